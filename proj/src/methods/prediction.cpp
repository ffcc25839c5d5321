#include "surveysim/methods/prediction.hpp"

#include <stdexcept>

namespace surveysim::methods {

bool IndividualPrediction::is_partial() const {
    const auto* dist = distribution();
    return dist && dist->coverage == Coverage::partial;
}

std::optional<std::string> IndividualPrediction::most_probable() const {
    if (const auto* c = choice()) return c->option_id;
    if (const auto* d = distribution()) {
        if (d->probabilities.empty()) return std::nullopt;
        const auto* best = &d->probabilities.front();
        for (const auto& entry : d->probabilities)
            if (entry.second > best->second) best = &entry;
        return best->first;
    }
    return std::nullopt;
}

IndividualPrediction make_invalid(std::string raw) {
    IndividualPrediction p;
    p.value = Invalid{raw};
    p.raw_output = std::move(raw);
    return p;
}

nlohmann::json prediction_to_json(const IndividualPrediction& prediction) {
    if (const auto* c = prediction.choice()) return {{"type", "choice"}, {"option", c->option_id}};
    if (const auto* d = prediction.distribution()) {
        nlohmann::json probabilities = nlohmann::json::array();
        for (const auto& [id, p] : d->probabilities) probabilities.push_back({id, p});
        return {{"type", "distribution"},
                {"coverage", d->coverage == Coverage::full ? "full" : "partial"},
                {"probabilities", probabilities}};
    }
    return {{"type", "invalid"}};
}

IndividualPrediction prediction_from_json(const nlohmann::json& doc) {
    IndividualPrediction prediction;
    const auto type = doc.at("type").get<std::string>();
    if (type == "choice") {
        prediction.value = Choice{doc.at("option").get<std::string>()};
    } else if (type == "distribution") {
        Distribution d;
        d.coverage = doc.at("coverage").get<std::string>() == "full" ? Coverage::full : Coverage::partial;
        for (const auto& entry : doc.at("probabilities"))
            d.probabilities.emplace_back(entry.at(0).get<std::string>(), entry.at(1).get<double>());
        prediction.value = std::move(d);
    } else if (type == "invalid") {
        prediction.value = Invalid{};
    } else {
        throw std::invalid_argument("unknown prediction type '" + type + "'");
    }
    return prediction;
}

}  // namespace surveysim::methods
