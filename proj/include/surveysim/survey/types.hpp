#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surveysim::survey {

class SurveyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Language { EN, DE };
enum class ScaleKind { categorical, ordinal };

struct ResponseOption {
    std::string id;
    std::string full_text;
    std::vector<std::string> aliases;
};

struct SurveyQuestion {
    std::string id;
    std::string text;
    std::vector<ResponseOption> options;  // scale order for ordinal questions
    ScaleKind scale_kind = ScaleKind::categorical;
    Language language = Language::EN;

    // Throws SurveyError when an instrument invariant does not hold.
    void validate() const;

    // Position of the option in original order; throws for an unknown id.
    std::size_t index_of(const std::string& option_id) const;
    bool has_option(const std::string& option_id) const;
};

enum class Labeling { full_text, indexed };
enum class Order { original, reversed };

struct ScaleVariant {
    Labeling labeling = Labeling::full_text;
    Order order = Order::original;

    auto operator<=>(const ScaleVariant&) const = default;

    // "full_text_original", "indexed_reversed", ...
    std::string name() const;
    static ScaleVariant parse(const std::string& name);
    static std::vector<ScaleVariant> all();
};

struct PresentedEntry {
    std::string label;
    std::string option_id;
};

struct PresentedScale {
    std::vector<PresentedEntry> entries;
    std::map<std::string, std::vector<std::string>> answer_surface_forms;
    ScaleVariant variant;

    std::vector<std::string> labels() const;
    // Option whose presentation label equals `label` exactly.
    std::optional<std::string> option_for_label(const std::string& label) const;
    const std::string& label_for(const std::string& option_id) const;
};

enum class AttributeKind { text, number, age };

struct AttributeSpec {
    std::string name;
    std::string column;  // defaults to name
    AttributeKind kind = AttributeKind::text;
    // Raw cell value -> prompt text, e.g. "Yes" -> a whole sentence.
    std::map<std::string, std::string> value_map;
};

struct Respondent {
    std::string id;
    std::map<std::string, std::string> attributes;    // missing attributes are absent
    std::map<std::string, std::string> ground_truth;  // question id -> option id

    const std::string* attribute(const std::string& name) const;
    const std::string* truth(const std::string& question_id) const;
};

struct PromptBundle {
    std::string system_text;
    std::string user_text;
    std::optional<std::string> assistant_prefill;

    bool operator==(const PromptBundle&) const = default;
};

struct DatasetSchema {
    std::string id;
    std::string id_column = "id";
    Language language = Language::EN;
    std::vector<AttributeSpec> attributes;
    std::vector<std::string> grouping_attributes;  // empty means all attributes
    std::vector<SurveyQuestion> questions;
    std::map<std::string, std::string> truth_columns;  // question id -> column

    const AttributeSpec* attribute(const std::string& name) const;
    const SurveyQuestion& question(const std::string& id) const;
};

struct Dataset {
    DatasetSchema schema;
    std::vector<Respondent> respondents;

    const Respondent& respondent(const std::string& id) const;
};

std::string to_string(Language language);
Language parse_language(const std::string& text);
std::string to_string(ScaleKind kind);
ScaleKind parse_scale_kind(const std::string& text);

}  // namespace surveysim::survey
