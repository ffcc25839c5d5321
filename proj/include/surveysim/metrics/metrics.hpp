#pragma once

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveysim/methods/prediction.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::metrics {

class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Probabilities aligned to the question's original option order.
using ResponseDistribution = std::vector<double>;

// One-hot for a choice, the normalized vector for a distribution, nullopt for
// an invalid prediction (excluded from aggregation).
std::optional<ResponseDistribution> to_distribution(const methods::IndividualPrediction& prediction,
                                                    const survey::SurveyQuestion& question);

// Respondent id -> prediction / ground-truth option id.
using Predictions = std::map<std::string, methods::IndividualPrediction>;
using Truths = std::map<std::string, std::string>;

// Macro-averaged F1 over the classes observed in `truths`. Distributions are
// reduced to their most probable option; an invalid or missing prediction is a
// false negative for its true class and a false positive nowhere.
double macro_f1(const Predictions& predictions, const Truths& truths);
double accuracy(const Predictions& predictions, const Truths& truths);

double tv_distance(std::span<const double> p, std::span<const double> q);

// Unit spacing between adjacent ranks: sum of |CDF_p - CDF_q|.
double wasserstein1(std::span<const double> p, std::span<const double> q);
// As above; throws for a categorical question.
double wasserstein1(const survey::SurveyQuestion& question, std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence, base-2 logarithm, bounded by 1.
double jsd(std::span<const double> p, std::span<const double> q);

// Items x raters matrix of category labels.
using Ratings = std::vector<std::vector<std::string>>;
inline constexpr const char* kInvalidCategory = "__invalid__";

double fleiss_kappa(const Ratings& ratings);

// Mean over options of the squared error against the one-hot truth.
double brier(std::span<const double> distribution, std::size_t truth_index);

// Sample distance correlation between paired rows of x and y.
double distance_correlation(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y);

}  // namespace surveysim::metrics
