#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "surveysim/metrics/metrics.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::metrics {

struct SubpopulationKey {
    std::string attribute;
    std::string value;  // raw value, or the decade bracket of an age

    auto operator<=>(const SubpopulationKey&) const = default;
    std::string label() const { return attribute + "=" + value; }
};

// Member respondent ids in dataset order.
using Subpopulations = std::map<SubpopulationKey, std::vector<std::string>>;

// "23" -> "20", "31.9" -> "30". Values that are not numbers pass through.
std::string age_bracket(const std::string& raw);

// One group per (attribute, observed value). Respondents missing an attribute
// are left out of that attribute's groups only. An empty attribute list means
// the schema's grouping attributes, or every attribute when those are unset.
Subpopulations build_subpopulations(const survey::Dataset& dataset, const std::vector<std::string>& attributes = {});

// Respondent id -> distribution; nullopt or absent marks an excluded member.
using IndividualDistributions = std::map<std::string, std::optional<ResponseDistribution>>;

// Mean over the non-excluded members. Throws MetricError when none remain.
ResponseDistribution subpop_distribution(const IndividualDistributions& distributions,
                                         const std::vector<std::string>& members);

}  // namespace surveysim::metrics
