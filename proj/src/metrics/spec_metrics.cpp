#include "surveysim/metrics/spec_metrics.hpp"

namespace surveysim::metrics {

ValidityStats validity_stats(std::span<const methods::IndividualPrediction> predictions) {
    if (predictions.empty()) return {};
    std::size_t invalid = 0;
    std::size_t partial = 0;
    for (const auto& p : predictions) {
        invalid += p.is_invalid();
        partial += p.is_partial();
    }
    const auto n = static_cast<double>(predictions.size());
    return {static_cast<double>(invalid) / n, static_cast<double>(partial) / n};
}

std::string to_string(DistanceKind kind) { return kind == DistanceKind::tv ? "tv" : "wasserstein1"; }

DistanceKind distance_kind_for(const survey::SurveyQuestion& question) {
    return question.scale_kind == survey::ScaleKind::ordinal ? DistanceKind::wasserstein1 : DistanceKind::tv;
}

namespace {

double distance(DistanceKind kind, const ResponseDistribution& p, const ResponseDistribution& q) {
    return kind == DistanceKind::tv ? tv_distance(p, q) : wasserstein1(p, q);
}

std::optional<double> mean_of(const std::vector<double>& values) {
    if (values.empty()) return std::nullopt;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace

SpecMetrics compute_spec_metrics(const survey::SurveyQuestion& question, const Predictions& predictions,
                                 const Truths& truths, const Subpopulations& subpopulations) {
    SpecMetrics out;
    out.respondents = truths.size();
    out.macro_f1 = macro_f1(predictions, truths);
    out.accuracy = accuracy(predictions, truths);
    out.distance_kind = distance_kind_for(question);

    std::vector<methods::IndividualPrediction> all;
    all.reserve(truths.size());
    IndividualDistributions generated;
    IndividualDistributions human;
    double brier_sum = 0.0;
    std::size_t brier_count = 0;
    for (const auto& [id, truth] : truths) {
        auto it = predictions.find(id);
        all.push_back(it == predictions.end() ? methods::make_invalid("") : it->second);
        const std::size_t truth_index = question.index_of(truth);
        ResponseDistribution one_hot(question.options.size(), 0.0);
        one_hot[truth_index] = 1.0;
        human[id] = std::move(one_hot);
        auto dist = to_distribution(all.back(), question);
        if (dist) {
            brier_sum += brier(*dist, truth_index);
            ++brier_count;
        }
        generated[id] = std::move(dist);
    }
    const auto validity = validity_stats(all);
    out.invalid_fraction = validity.invalid_fraction;
    out.partial_fraction = validity.partial_fraction;
    if (brier_count > 0) out.brier = brier_sum / static_cast<double>(brier_count);

    std::vector<std::string> everyone;
    for (const auto& [id, truth] : truths) everyone.push_back(id);
    if (brier_count > 0) {
        const auto g = subpop_distribution(generated, everyone);
        const auto h = subpop_distribution(human, everyone);
        out.population_distance = distance(out.distance_kind, g, h);
        out.population_jsd = jsd(g, h);
    }

    std::vector<double> distances;
    std::vector<double> jsds;
    double weighted_sum = 0.0;
    double weight_total = 0.0;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;
    for (const auto& [key, members] : subpopulations) {
        std::vector<std::string> present;
        for (const auto& id : members)
            if (truths.contains(id)) present.push_back(id);
        if (present.empty()) continue;
        SubpopulationScore score{key, present.size(), 0, std::nullopt, std::nullopt};
        for (const auto& id : present) score.valid += generated.at(id).has_value();
        if (score.valid > 0) {
            const auto g = subpop_distribution(generated, present);
            const auto h = subpop_distribution(human, present);
            score.distance = distance(out.distance_kind, g, h);
            score.jsd = jsd(g, h);
            distances.push_back(*score.distance);
            jsds.push_back(*score.jsd);
            weighted_sum += *score.distance * static_cast<double>(score.size);
            weight_total += static_cast<double>(score.size);
            x.push_back(g);
            y.push_back(h);
        }
        out.subpopulations.push_back(std::move(score));
    }
    out.mean_distance = mean_of(distances);
    out.mean_jsd = mean_of(jsds);
    if (weight_total > 0) out.weighted_mean_distance = weighted_sum / weight_total;
    if (x.size() >= 2) out.dcor = distance_correlation(x, y);
    return out;
}

SpecMetrics apply_exclusion(SpecMetrics metrics, double threshold) {
    if (!(metrics.invalid_fraction > threshold)) return metrics;
    metrics.gated = true;
    metrics.population_distance.reset();
    metrics.population_jsd.reset();
    metrics.subpopulations.clear();
    metrics.mean_distance.reset();
    metrics.weighted_mean_distance.reset();
    metrics.mean_jsd.reset();
    metrics.dcor.reset();
    metrics.brier.reset();
    return metrics;
}

Ratings build_ratings(const std::vector<const Predictions*>& raters, const std::vector<std::string>& items) {
    Ratings ratings;
    ratings.reserve(items.size());
    for (const auto& id : items) {
        std::vector<std::string> row;
        row.reserve(raters.size());
        for (const auto* rater : raters) {
            auto it = rater->find(id);
            std::optional<std::string> label;
            if (it != rater->end()) label = it->second.most_probable();
            row.push_back(label ? *label : kInvalidCategory);
        }
        ratings.push_back(std::move(row));
    }
    return ratings;
}

}  // namespace surveysim::metrics
