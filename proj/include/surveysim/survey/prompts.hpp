#pragma once

#include <string>

#include "surveysim/survey/types.hpp"

namespace surveysim::survey {

// Which instruction block a prompt carries. Methods map onto these.
enum class PromptKind {
    token_probability,
    answer_prefix,
    restricted_choice,
    restricted_reasoning,
    verbalized_distribution,
    open_generation,
    classify_choice,
    classify_distribution,
};

// Persona template: free text with {attribute} placeholders plus the reserved
// {QUESTION} and {RESPONSE OPTIONS}. The marker splits the text into
// sentences; a sentence referencing a missing attribute is dropped whole.
struct TemplateSet {
    std::string persona;
    std::string sentence_marker = "|";
};

// JSON keys of the restricted formats in the question's language.
struct JsonKeys {
    std::string answer;
    std::string reasoning;
};
JsonKeys json_keys(Language language);

// "My answer is " / "Meine Antwort ist ".
std::string answer_prefix(Language language);

// Inline option list: comma-separated labels (indexed) or quoted full texts.
std::string render_response_options(const PresentedScale& presented);

// Attribute value as it appears in a persona prompt.
std::string display_value(const AttributeSpec& spec, const std::string& raw);

std::string render_persona(const TemplateSet& templates, const DatasetSchema& schema, const Respondent& respondent,
                           const SurveyQuestion& question, const PresentedScale& presented);

std::string render_system_prompt(PromptKind kind, const SurveyQuestion& question, const PresentedScale& presented);

// System + persona user prompt for every kind except the classification step.
PromptBundle render_prompts(const TemplateSet& templates, const DatasetSchema& schema, const Respondent& respondent,
                            const SurveyQuestion& question, const PresentedScale& presented, PromptKind kind);

// Annotator prompts for the second step of the open generation methods.
PromptBundle render_classification_prompts(const SurveyQuestion& question, const PresentedScale& presented,
                                           const std::string& open_text, PromptKind kind);

}  // namespace surveysim::survey
