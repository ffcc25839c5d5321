#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "surveysim/methods/prediction.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::methods {

using JsonSchemaDoc = nlohmann::ordered_json;

// {"answer_option": <label>} with the labels as enum, presentation order.
JsonSchemaDoc build_choice_schema(const survey::PresentedScale& presented,
                                  survey::Language language = survey::Language::EN);

// {"reasoning": <string>, "answer_option": <label>}, reasoning first.
JsonSchemaDoc build_reasoning_schema(const survey::PresentedScale& presented,
                                     survey::Language language = survey::Language::EN);

// One required number per presentation label. Range is checked after parsing.
JsonSchemaDoc build_distribution_schema(const survey::PresentedScale& presented);

// First syntactically complete JSON object in `text`, tolerating code fences
// and surrounding prose.
std::optional<nlohmann::ordered_json> extract_json_object(std::string_view text);

enum class ChoiceFormat { answer_only, with_reasoning };

// Valid only when the object satisfies the matching schema exactly: the answer
// must be one of the presented labels and no extra keys may appear.
IndividualPrediction parse_choice(const std::string& text, const survey::PresentedScale& presented,
                                  survey::Language language = survey::Language::EN,
                                  ChoiceFormat format = ChoiceFormat::answer_only);

// Per-option numbers keyed by label (or an accepted surface form). Missing
// options count as 0 and mark the result partial; values are renormalized.
// Negative or non-numeric values, or an all-zero vector, are invalid.
IndividualPrediction parse_distribution(const std::string& text, const survey::PresentedScale& presented);

}  // namespace surveysim::methods
