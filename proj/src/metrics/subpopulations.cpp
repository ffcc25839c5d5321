#include "surveysim/metrics/subpopulations.hpp"

#include <charconv>
#include <cmath>

namespace surveysim::metrics {

std::string age_bracket(const std::string& raw) {
    double value = 0.0;
    const auto* end = raw.data() + raw.size();
    const auto [ptr, ec] = std::from_chars(raw.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) return raw;
    const auto bracket = static_cast<long long>(std::floor(value / 10.0)) * 10;
    return std::to_string(bracket);
}

Subpopulations build_subpopulations(const survey::Dataset& dataset, const std::vector<std::string>& attributes) {
    std::vector<std::string> names = attributes;
    if (names.empty()) names = dataset.schema.grouping_attributes;
    if (names.empty())
        for (const auto& spec : dataset.schema.attributes) names.push_back(spec.name);

    Subpopulations groups;
    for (const auto& name : names) {
        const auto* spec = dataset.schema.attribute(name);
        if (!spec) throw MetricError("unknown grouping attribute '" + name + "'");
        for (const auto& respondent : dataset.respondents) {
            const std::string* value = respondent.attribute(name);
            if (!value) continue;
            const std::string group = spec->kind == survey::AttributeKind::age ? age_bracket(*value) : *value;
            groups[{name, group}].push_back(respondent.id);
        }
    }
    return groups;
}

ResponseDistribution subpop_distribution(const IndividualDistributions& distributions,
                                         const std::vector<std::string>& members) {
    ResponseDistribution mean;
    std::size_t counted = 0;
    for (const auto& id : members) {
        auto it = distributions.find(id);
        if (it == distributions.end() || !it->second) continue;
        const auto& dist = *it->second;
        if (mean.empty()) mean.assign(dist.size(), 0.0);
        if (dist.size() != mean.size()) throw MetricError("subpopulation members disagree on option count");
        for (std::size_t i = 0; i < dist.size(); ++i) mean[i] += dist[i];
        ++counted;
    }
    if (counted == 0) throw MetricError("every subpopulation member is excluded");
    for (auto& p : mean) p /= static_cast<double>(counted);
    return mean;
}

}  // namespace surveysim::metrics
