#include "surveysim/survey/prompts.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace surveysim::survey {

namespace {

constexpr std::string_view kQuestion = "QUESTION";
constexpr std::string_view kResponseOptions = "RESPONSE OPTIONS";

struct LanguageText {
    std::string_view persona_head;  // {QUESTION} follows, then "."
    std::string_view options_intro;
    std::string_view annotator_head;
    std::string_view labels_intro;
    std::string_view token_instruction;
    std::string_view choice_instruction;
    std::string_view reasoning_first;
    std::string_view reasoning_instruction;
    std::string_view reasoning_placeholder;
    std::string_view distribution_instruction;
    std::string_view probability_placeholder;
    std::string_view classify_choice_instruction;
    std::string_view classify_distribution_instruction;
    std::string_view statement_head;
    std::string_view statement_tail;
    std::string_view statement_question;
    std::string_view statement_label;
};

const LanguageText kEnglish{
    "You are a political scientist predicting responses to the following question: ",
    "These are the possible answer options: ",
    "You are an expert annotator.",
    "These are the possible labels: ",
    "You only respond with the most probable answer option.",
    "You only respond with the most probable answer option in the following JSON format:",
    "You always reason about the possible answer options first.",
    "You respond with your reasoning and the most probable answer option in the following JSON format:",
    "<your reasoning about the answer options>",
    "You only respond with a probability for each answer option in the following JSON format:",
    "<probability>",
    "You only respond with the most probable label in the following JSON format:",
    "You only respond with a probability for each answer option in the following JSON format:",
    "Below is a STATEMENT that responds to the question: ",
    "",
    "Does the following STATEMENT express preference for exactly one of the following answer options: <",
    ">? If yes, which option is preferred?\n\nSTATEMENT: ",
};

// The token-method instruction is English in the German template set as well.
const LanguageText kGerman{
    "Du bist ein Politikwissenschaftler, der Antworten auf die folgende Frage vorhersagt: ",
    "Dies sind die möglichen Antwortoptionen: ",
    "Du bist ein erfahrener Annotator.",
    "Das sind die möglichen Labels: ",
    "You only respond with the most probable answer option.",
    "Du antwortest ausschließlich mit der wahrscheinlichsten Antwortoption im folgenden JSON-Format:",
    "Du argumentierst immer zuerst über die möglichen Antwort-Optionen.",
    "Du antwortest mit deiner Argumentation und der wahrscheinlichsten Antwort-Option im folgenden JSON-Format:",
    "<deine Argumentation über die Antwort-Optionen>",
    "Du antwortest ausschließlich mit einer Wahrscheinlichkeit für jede Antwort-Option im folgenden JSON-Format:",
    "<Wahrscheinlichkeit>",
    "Du antwortest nur mit dem wahrscheinlichsten Label im folgenden JSON-Format:",
    "Du antwortest nur mit einer Wahrscheinlichkeit für jede Antwortoption im folgenden JSON-Format:",
    "Nachfolgend findest du eine AUSSAGE, die auf die Frage ",
    " antwortet.",
    "Drückt die folgende AUSSAGE eine Präferenz für genau eine der folgenden Antwortoptionen aus: <",
    ">? Wenn ja, welche Option wird bevorzugt?\n\nAUSSAGE: ",
};

const LanguageText& text_for(Language language) { return language == Language::EN ? kEnglish : kGerman; }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

// "A) Clinton" per line for indexed variants, nothing otherwise.
std::string index_legend(const SurveyQuestion& question, const PresentedScale& presented) {
    if (presented.variant.labeling != Labeling::indexed) return {};
    std::string legend;
    for (const auto& entry : presented.entries) {
        legend += "\n" + entry.label + ") ";
        legend += question.options[question.index_of(entry.option_id)].full_text;
    }
    return legend;
}

std::string json_block(const std::string& body) { return "\n```json\n{\n" + body + "\n}\n```"; }

std::string choice_block(const JsonKeys& keys, const std::string& options, bool angle) {
    return json_block("  " + quoted(keys.answer) + ": " + (angle ? "<" + options + ">" : options));
}

std::string distribution_block(const PresentedScale& presented, std::string_view placeholder) {
    std::string body;
    for (std::size_t i = 0; i < presented.entries.size(); ++i) {
        if (i) body += ",\n";
        body += "  " + quoted(presented.entries[i].label) + ": " + std::string(placeholder);
    }
    return json_block(body);
}

std::string format_number(double value) {
    if (std::isfinite(value) && value == std::floor(value) && std::fabs(value) < 1e15) {
        std::ostringstream out;
        out << static_cast<long long>(value);
        return out.str();
    }
    std::ostringstream out;
    out << value;
    return out.str();
}

std::optional<double> parse_number(const std::string& raw) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) return std::nullopt;
    return value;
}

}  // namespace

JsonKeys json_keys(Language language) {
    if (language == Language::DE) return {"antwort", "argumentation"};
    return {"answer_option", "reasoning"};
}

std::string answer_prefix(Language language) {
    return language == Language::EN ? "My answer is " : "Meine Antwort ist ";
}

std::string render_response_options(const PresentedScale& presented) {
    std::string out;
    for (std::size_t i = 0; i < presented.entries.size(); ++i) {
        if (i) out += ", ";
        const auto& label = presented.entries[i].label;
        out += presented.variant.labeling == Labeling::indexed ? label : quoted(label);
    }
    return out;
}

std::string display_value(const AttributeSpec& spec, const std::string& raw) {
    if (auto it = spec.value_map.find(raw); it != spec.value_map.end()) return it->second;
    if (spec.kind == AttributeKind::text) return raw;
    auto number = parse_number(raw);
    if (!number) return raw;
    if (spec.kind == AttributeKind::age) return format_number(std::trunc(*number));
    return format_number(*number);
}

std::string render_persona(const TemplateSet& templates, const DatasetSchema& schema, const Respondent& respondent,
                           const SurveyQuestion& question, const PresentedScale& presented) {
    std::vector<std::string> units;
    if (templates.sentence_marker.empty()) {
        units.push_back(templates.persona);
    } else {
        std::size_t start = 0;
        for (;;) {
            auto pos = templates.persona.find(templates.sentence_marker, start);
            if (pos == std::string::npos) {
                units.push_back(templates.persona.substr(start));
                break;
            }
            units.push_back(templates.persona.substr(start, pos - start));
            start = pos + templates.sentence_marker.size();
        }
    }
    const bool omittable = units.size() > 1;

    std::string out;
    for (const auto& unit : units) {
        std::string rendered;
        bool drop = false;
        std::size_t i = 0;
        while (i < unit.size()) {
            if (unit[i] != '{') {
                rendered += unit[i++];
                continue;
            }
            auto close = unit.find('}', i);
            if (close == std::string::npos) throw SurveyError("unterminated placeholder in persona template");
            const std::string name = unit.substr(i + 1, close - i - 1);
            i = close + 1;
            if (name == kQuestion) {
                rendered += question.text;
            } else if (name == kResponseOptions) {
                rendered += render_response_options(presented);
            } else if (const auto* spec = schema.attribute(name)) {
                if (const auto* value = respondent.attribute(name)) {
                    rendered += display_value(*spec, *value);
                } else if (omittable) {
                    drop = true;
                } else {
                    throw SurveyError("attribute '" + name + "' missing for respondent '" + respondent.id +
                                      "' and the template has no omittable sentences");
                }
            } else {
                throw SurveyError("unresolvable placeholder '{" + name + "}' in persona template");
            }
        }
        if (!drop) out += rendered;
    }
    return out;
}

std::string render_system_prompt(PromptKind kind, const SurveyQuestion& question, const PresentedScale& presented) {
    const auto& text = text_for(question.language);
    const auto keys = json_keys(question.language);
    const auto options = render_response_options(presented);
    const auto legend = index_legend(question, presented);
    const std::string head = std::string(text.persona_head) + question.text + ".";
    const std::string with_options = head + "\n" + std::string(text.options_intro) + options + "." + legend;
    const std::string annotator =
        std::string(text.annotator_head) + "\n" + std::string(text.labels_intro) + options + "." + legend;

    switch (kind) {
        case PromptKind::token_probability:
        case PromptKind::answer_prefix:
            return with_options + "\n" + std::string(text.token_instruction);
        case PromptKind::restricted_choice:
            return with_options + "\n" + std::string(text.choice_instruction) + choice_block(keys, options, false);
        case PromptKind::restricted_reasoning:
            return with_options + "\n" + std::string(text.reasoning_first) + "\n" +
                   std::string(text.reasoning_instruction) +
                   json_block("  " + quoted(keys.reasoning) + ": " + std::string(text.reasoning_placeholder) +
                              ",\n  " + quoted(keys.answer) + ": <" + options + ">");
        case PromptKind::verbalized_distribution:
            return with_options + "\n" + std::string(text.distribution_instruction) +
                   distribution_block(presented, text.probability_placeholder);
        case PromptKind::open_generation:
            return head;
        case PromptKind::classify_choice:
            return annotator + "\n" + std::string(text.classify_choice_instruction) + choice_block(keys, options, true);
        case PromptKind::classify_distribution:
            return annotator + "\n" + std::string(text.classify_distribution_instruction) +
                   distribution_block(presented, text.probability_placeholder);
    }
    throw SurveyError("unknown prompt kind");
}

PromptBundle render_prompts(const TemplateSet& templates, const DatasetSchema& schema, const Respondent& respondent,
                            const SurveyQuestion& question, const PresentedScale& presented, PromptKind kind) {
    if (kind == PromptKind::classify_choice || kind == PromptKind::classify_distribution)
        throw SurveyError("classification prompts need the open-ended output");
    PromptBundle bundle;
    bundle.system_text = render_system_prompt(kind, question, presented);
    bundle.user_text = render_persona(templates, schema, respondent, question, presented);
    if (bundle.user_text.empty()) throw SurveyError("persona template rendered to an empty prompt");
    if (kind == PromptKind::answer_prefix) bundle.assistant_prefill = answer_prefix(question.language);
    return bundle;
}

PromptBundle render_classification_prompts(const SurveyQuestion& question, const PresentedScale& presented,
                                           const std::string& open_text, PromptKind kind) {
    if (kind != PromptKind::classify_choice && kind != PromptKind::classify_distribution)
        throw SurveyError("not a classification prompt kind");
    const auto& text = text_for(question.language);
    PromptBundle bundle;
    bundle.system_text = render_system_prompt(kind, question, presented);
    bundle.user_text = std::string(text.statement_head) + question.text + std::string(text.statement_tail) + "\n" +
                       std::string(text.statement_question) + render_response_options(presented) +
                       std::string(text.statement_label) + open_text;
    return bundle;
}

}  // namespace surveysim::survey
