#include "surveysim/harness/spec.hpp"

#include <cstdio>
#include <stdexcept>

namespace surveysim::harness {

std::string to_string(Decoding decoding) {
    switch (decoding) {
        case Decoding::greedy: return "greedy";
        case Decoding::default_temperature: return "default_temperature";
        case Decoding::sweep: return "sweep";
    }
    return "greedy";
}

Decoding parse_decoding(const std::string& text) {
    if (text == "greedy") return Decoding::greedy;
    if (text == "default_temperature") return Decoding::default_temperature;
    if (text == "sweep") return Decoding::sweep;
    throw std::invalid_argument("unknown decoding '" + text + "'");
}

std::uint64_t stable_hash64(std::string_view text) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::string stable_hash(std::string_view text) {
    char buffer[17];
    std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(stable_hash64(text)));
    return buffer;
}

std::string SimulationSpec::canonical() const {
    char temperature_text[32];
    std::snprintf(temperature_text, sizeof temperature_text, "%.17g", temperature);
    std::string out;
    for (const auto& part : {dataset_id, question_id, methods::to_string(method), model_id, variant.name(),
                             to_string(decoding), std::to_string(seed), std::string(temperature_text),
                             top_k ? std::to_string(*top_k) : std::string("-")}) {
        // Length-prefixed so that no two field tuples share a canonical form.
        out += std::to_string(part.size()) + ":" + part + ";";
    }
    return out;
}

std::string SimulationSpec::key() const { return stable_hash(canonical()); }

std::string SimulationSpec::record_key(const std::string& respondent_id) const {
    return stable_hash(canonical() + std::to_string(respondent_id.size()) + ":" + respondent_id);
}

backend::SamplingParams SimulationSpec::sampling(int max_tokens) const {
    backend::SamplingParams params;
    params.max_tokens = max_tokens;
    if (decoding == Decoding::greedy) {
        params.mode = backend::DecodingMode::greedy;
        params.seed = 0;
    } else {
        params.mode = backend::DecodingMode::sampled;
        params.temperature = temperature;
        params.seed = seed;
        params.top_k = top_k;
    }
    return params;
}

nlohmann::json SimulationSpec::to_json() const {
    nlohmann::json doc = {{"dataset", dataset_id},
                          {"question", question_id},
                          {"method", methods::to_string(method)},
                          {"model", model_id},
                          {"variant", variant.name()},
                          {"decoding", to_string(decoding)},
                          {"seed", seed},
                          {"temperature", temperature}};
    doc["top_k"] = top_k ? nlohmann::json(*top_k) : nlohmann::json(nullptr);
    return doc;
}

SimulationSpec SimulationSpec::from_json(const nlohmann::json& doc) {
    SimulationSpec spec;
    spec.dataset_id = doc.at("dataset").get<std::string>();
    spec.question_id = doc.at("question").get<std::string>();
    spec.method = methods::parse_method(doc.at("method").get<std::string>());
    spec.model_id = doc.at("model").get<std::string>();
    spec.variant = survey::ScaleVariant::parse(doc.at("variant").get<std::string>());
    spec.decoding = parse_decoding(doc.at("decoding").get<std::string>());
    spec.seed = doc.at("seed").get<std::int64_t>();
    spec.temperature = doc.at("temperature").get<double>();
    if (doc.contains("top_k") && !doc["top_k"].is_null()) spec.top_k = doc["top_k"].get<int>();
    return spec;
}

}  // namespace surveysim::harness
