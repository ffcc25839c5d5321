#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace surveysim::backend {

// Validates `value` against the schema subset used by the restricted formats:
// type (object, string, number, integer, boolean), enum, properties,
// required, additionalProperties=false. On failure, `why` (if given) names
// the first violation.
bool schema_accepts(const nlohmann::ordered_json& schema, const nlohmann::ordered_json& value,
                    std::string* why = nullptr);

}  // namespace surveysim::backend
