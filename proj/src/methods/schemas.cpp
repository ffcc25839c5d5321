#include "surveysim/methods/schemas.hpp"

#include <cmath>
#include <map>

#include "surveysim/backend/json_schema.hpp"
#include "surveysim/survey/prompts.hpp"
#include "surveysim/token_map/token_map.hpp"

namespace surveysim::methods {

namespace {

using ojson = nlohmann::ordered_json;

ojson answer_property(const survey::PresentedScale& presented) {
    ojson labels = ojson::array();
    for (const auto& label : presented.labels()) labels.push_back(label);
    return {{"type", "string"}, {"enum", labels}};
}

// Position after the object starting at `open`, or npos when unbalanced.
std::size_t balanced_end(std::string_view text, std::size_t open) {
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = open; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\')
                ++i;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}' && --depth == 0)
            return i + 1;
    }
    return std::string_view::npos;
}

std::optional<std::string> option_for_key(const std::string& key, const survey::PresentedScale& presented) {
    if (auto id = presented.option_for_label(key)) return id;
    const auto normalized = token_map::normalize_token(key);
    if (normalized.empty()) return std::nullopt;
    std::optional<std::string> found;
    for (const auto& [id, surfaces] : presented.answer_surface_forms) {
        for (const auto& surface : surfaces) {
            if (token_map::normalize_token(surface) == normalized) {
                if (found && *found != id) return std::nullopt;
                found = id;
            }
        }
    }
    return found;
}

}  // namespace

JsonSchemaDoc build_choice_schema(const survey::PresentedScale& presented, survey::Language language) {
    const auto keys = survey::json_keys(language);
    ojson schema = {{"type", "object"}};
    schema["properties"] = ojson::object();
    schema["properties"][keys.answer] = answer_property(presented);
    schema["required"] = ojson::array({keys.answer});
    schema["additionalProperties"] = false;
    return schema;
}

JsonSchemaDoc build_reasoning_schema(const survey::PresentedScale& presented, survey::Language language) {
    const auto keys = survey::json_keys(language);
    ojson schema = {{"type", "object"}};
    schema["properties"] = ojson::object();
    schema["properties"][keys.reasoning] = {{"type", "string"}};
    schema["properties"][keys.answer] = answer_property(presented);
    schema["required"] = ojson::array({keys.reasoning, keys.answer});
    schema["additionalProperties"] = false;
    return schema;
}

JsonSchemaDoc build_distribution_schema(const survey::PresentedScale& presented) {
    ojson schema = {{"type", "object"}};
    schema["properties"] = ojson::object();
    ojson required = ojson::array();
    for (const auto& label : presented.labels()) {
        schema["properties"][label] = {{"type", "number"}};
        required.push_back(label);
    }
    schema["required"] = required;
    schema["additionalProperties"] = false;
    return schema;
}

std::optional<nlohmann::ordered_json> extract_json_object(std::string_view text) {
    for (std::size_t open = text.find('{'); open != std::string_view::npos; open = text.find('{', open + 1)) {
        const auto end = balanced_end(text, open);
        if (end == std::string_view::npos) continue;
        auto parsed = ojson::parse(text.substr(open, end - open), nullptr, false);
        if (!parsed.is_discarded() && parsed.is_object()) return parsed;
    }
    return std::nullopt;
}

IndividualPrediction parse_choice(const std::string& text, const survey::PresentedScale& presented,
                                  survey::Language language, ChoiceFormat format) {
    auto object = extract_json_object(text);
    if (!object) return make_invalid(text);
    const auto schema = format == ChoiceFormat::with_reasoning ? build_reasoning_schema(presented, language)
                                                               : build_choice_schema(presented, language);
    if (!backend::schema_accepts(schema, *object)) return make_invalid(text);
    const auto label = (*object)[survey::json_keys(language).answer].get<std::string>();
    const auto option = presented.option_for_label(label);
    if (!option) return make_invalid(text);
    IndividualPrediction prediction;
    prediction.value = Choice{*option};
    prediction.raw_output = text;
    if (format == ChoiceFormat::with_reasoning)
        prediction.reasoning_text = (*object)[survey::json_keys(language).reasoning].get<std::string>();
    return prediction;
}

IndividualPrediction parse_distribution(const std::string& text, const survey::PresentedScale& presented) {
    auto object = extract_json_object(text);
    if (!object) return make_invalid(text);

    std::map<std::string, double> values;
    for (const auto& [key, value] : object->items()) {
        const auto option = option_for_key(key, presented);
        if (!option) continue;
        if (!value.is_number()) return make_invalid(text);
        const double v = value.get<double>();
        if (!(v >= 0.0)) return make_invalid(text);
        values.emplace(*option, v);  // first occurrence wins
    }
    double total = 0.0;
    for (const auto& [id, v] : values) total += v;
    if (!(total > 0.0) || !std::isfinite(total)) return make_invalid(text);

    Distribution dist;
    dist.coverage = values.size() == presented.entries.size() ? Coverage::full : Coverage::partial;
    for (const auto& entry : presented.entries) {
        auto it = values.find(entry.option_id);
        dist.probabilities.emplace_back(entry.option_id, it == values.end() ? 0.0 : it->second / total);
    }
    IndividualPrediction prediction;
    prediction.value = std::move(dist);
    prediction.raw_output = text;
    return prediction;
}

}  // namespace surveysim::methods
