#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace surveysim::methods {

enum class Coverage { full, partial };

struct Choice {
    std::string option_id;
    bool operator==(const Choice&) const = default;
};

struct Distribution {
    // (option id, probability) in presentation order; sums to 1.
    std::vector<std::pair<std::string, double>> probabilities;
    Coverage coverage = Coverage::full;
    bool operator==(const Distribution&) const = default;
};

struct Invalid {
    std::string raw_text;
    bool operator==(const Invalid&) const = default;
};

struct IndividualPrediction {
    std::variant<Choice, Distribution, Invalid> value;
    std::string raw_output;
    std::optional<std::string> reasoning_text;

    bool is_invalid() const { return std::holds_alternative<Invalid>(value); }
    bool is_partial() const;
    const Choice* choice() const { return std::get_if<Choice>(&value); }
    const Distribution* distribution() const { return std::get_if<Distribution>(&value); }

    // Choice as-is; most probable option of a distribution, ties going to the
    // first option in presentation order; nullopt when invalid.
    std::optional<std::string> most_probable() const;
};

IndividualPrediction make_invalid(std::string raw);

// Persisted form of the parsed prediction (without raw text).
nlohmann::json prediction_to_json(const IndividualPrediction& prediction);
IndividualPrediction prediction_from_json(const nlohmann::json& doc);

}  // namespace surveysim::methods
