#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "surveysim/harness/config.hpp"
#include "surveysim/harness/spec.hpp"
#include "surveysim/methods/run_method.hpp"
#include "surveysim/metrics/spec_metrics.hpp"

namespace surveysim::harness {

struct SpecRow {
    SimulationSpec spec;
    metrics::SpecMetrics metrics;
};

struct BaselineRow {
    std::string dataset_id;
    std::string question_id;
    std::uint64_t seed = 0;
    metrics::SpecMetrics metrics;
};

// Scale variants as raters, or sampling seeds as raters.
enum class Facet { variant, seed };
std::string to_string(Facet facet);

struct RobustnessRow {
    Facet facet = Facet::variant;
    SimulationSpec group;  // any member; the facet field varies within the group
    std::vector<std::string> raters;
    std::size_t items = 0;
    std::optional<double> kappa;  // absent when any member cell is gated
    bool gated = false;
};

struct Evaluation {
    double threshold = metrics::kDefaultExclusionThreshold;
    std::vector<SpecRow> specs;  // ordered by grid factors
    std::vector<BaselineRow> baselines;
    std::vector<RobustnessRow> robustness;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Metrics for every cell present in the records, the stratified baseline of
// each evaluated dataset/question, and kappa over variants and over seeds.
// Throws EvaluationError when a record names an unknown dataset or question,
// or a respondent without ground truth.
Evaluation evaluate(const std::vector<survey::Dataset>& datasets, const std::vector<methods::RunRecord>& records,
                    double threshold, std::uint64_t baseline_seed);

// Baseline rows for every question of every dataset.
std::vector<BaselineRow> evaluate_baselines(const std::vector<survey::Dataset>& datasets, std::uint64_t seed,
                                            double threshold);

// metrics.csv (long format), summary.md and plotdata/*.csv.
void write_reports(const Evaluation& evaluation, const std::filesystem::path& reports_dir);

std::string metrics_csv(const Evaluation& evaluation);
std::string summary_markdown(const Evaluation& evaluation);

}  // namespace surveysim::harness
