#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surveysim/metrics/metrics.hpp"
#include "surveysim/metrics/subpopulations.hpp"

namespace surveysim::metrics {

struct ValidityStats {
    double invalid_fraction = 0.0;
    double partial_fraction = 0.0;
};

ValidityStats validity_stats(std::span<const methods::IndividualPrediction> predictions);

enum class DistanceKind { tv, wasserstein1 };
std::string to_string(DistanceKind kind);
// Total variation for categorical questions, 1-Wasserstein for ordinal ones.
DistanceKind distance_kind_for(const survey::SurveyQuestion& question);

struct SubpopulationScore {
    SubpopulationKey key;
    std::size_t size = 0;   // members with ground truth
    std::size_t valid = 0;  // members whose prediction carries a distribution
    std::optional<double> distance;  // absent when every member is excluded
    std::optional<double> jsd;
};

struct SpecMetrics {
    std::size_t respondents = 0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    double invalid_fraction = 0.0;
    double partial_fraction = 0.0;
    DistanceKind distance_kind = DistanceKind::tv;
    bool gated = false;

    // Alignment fields; cleared by apply_exclusion.
    std::optional<double> population_distance;
    std::optional<double> population_jsd;
    std::vector<SubpopulationScore> subpopulations;
    std::optional<double> mean_distance;           // unweighted over subpopulations
    std::optional<double> weighted_mean_distance;  // weighted by subpopulation size
    std::optional<double> mean_jsd;
    std::optional<double> dcor;
    std::optional<double> brier;
};

// Every metric of one grid cell. `truths` defines the evaluated respondents;
// predictions for other respondents are an error, missing ones count invalid.
SpecMetrics compute_spec_metrics(const survey::SurveyQuestion& question, const Predictions& predictions,
                                 const Truths& truths, const Subpopulations& subpopulations);

inline constexpr double kDefaultExclusionThreshold = 0.10;

// Suppresses the alignment fields when invalid_fraction exceeds the threshold.
// Individual-level scores and validity fractions are kept.
SpecMetrics apply_exclusion(SpecMetrics metrics, double threshold = kDefaultExclusionThreshold);

// Items x raters matrix for Fleiss' kappa: each rater's most probable option,
// or kInvalidCategory when its prediction is invalid or missing.
Ratings build_ratings(const std::vector<const Predictions*>& raters, const std::vector<std::string>& items);

}  // namespace surveysim::metrics
