#include "surveysim/backend/json_schema.hpp"

namespace surveysim::backend {

namespace {

bool fail(std::string* why, std::string message) {
    if (why) *why = std::move(message);
    return false;
}

bool type_matches(const std::string& type, const nlohmann::ordered_json& value) {
    if (type == "object") return value.is_object();
    if (type == "string") return value.is_string();
    if (type == "number") return value.is_number();
    if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
    if (type == "boolean") return value.is_boolean();
    if (type == "array") return value.is_array();
    if (type == "null") return value.is_null();
    return false;
}

}  // namespace

bool schema_accepts(const nlohmann::ordered_json& schema, const nlohmann::ordered_json& value, std::string* why) {
    if (!schema.is_object()) return fail(why, "schema is not an object");
    if (auto it = schema.find("type"); it != schema.end()) {
        if (!it->is_string() || !type_matches(it->get<std::string>(), value))
            return fail(why, "expected type " + it->dump());
    }
    if (auto it = schema.find("enum"); it != schema.end()) {
        bool found = false;
        for (const auto& allowed : *it) found = found || allowed == value;
        if (!found) return fail(why, "value " + value.dump() + " not in enum");
    }
    if (!value.is_object()) return true;

    const auto props = schema.find("properties");
    if (auto it = schema.find("required"); it != schema.end()) {
        for (const auto& key : *it)
            if (!value.contains(key.get<std::string>()))
                return fail(why, "missing required key '" + key.get<std::string>() + "'");
    }
    const auto additional = schema.find("additionalProperties");
    const bool closed = additional != schema.end() && additional->is_boolean() && !additional->get<bool>();
    for (const auto& [key, child] : value.items()) {
        if (props != schema.end() && props->contains(key)) {
            if (!schema_accepts((*props)[key], child, why)) return false;
        } else if (closed) {
            return fail(why, "unexpected key '" + key + "'");
        }
    }
    return true;
}

}  // namespace surveysim::backend
