#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "surveysim/backend/types.hpp"
#include "surveysim/methods/method_id.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::harness {

// Greedy runs form their own decoding level rather than temperature 0 with a
// seed; sweep cells carry an explicit temperature and top-k.
enum class Decoding { greedy, default_temperature, sweep };

inline constexpr std::int64_t kGreedySeed = -1;

std::string to_string(Decoding decoding);
Decoding parse_decoding(const std::string& text);

// One cell of the evaluation grid.
struct SimulationSpec {
    std::string dataset_id;
    std::string question_id;
    methods::MethodId method = methods::MethodId::restricted_choice;
    std::string model_id;
    survey::ScaleVariant variant;
    Decoding decoding = Decoding::greedy;
    std::int64_t seed = kGreedySeed;
    double temperature = 0.0;  // resolved model default for default_temperature cells
    std::optional<int> top_k;

    bool operator==(const SimulationSpec&) const = default;

    // Stable across runs and platforms; every field participates.
    std::string canonical() const;
    std::string key() const;
    // Resume key of one respondent in this cell.
    std::string record_key(const std::string& respondent_id) const;

    backend::SamplingParams sampling(int max_tokens) const;

    nlohmann::json to_json() const;
    static SimulationSpec from_json(const nlohmann::json& doc);
};

// FNV-1a 64-bit, lower-case hex.
std::string stable_hash(std::string_view text);
std::uint64_t stable_hash64(std::string_view text);

}  // namespace surveysim::harness
