#include "surveysim/metrics/metrics.hpp"

#include <cmath>
#include <set>

#include "surveysim/metrics/kernels.hpp"

namespace surveysim::metrics {

namespace {

void require_same_length(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw MetricError("distribution length mismatch: " + std::to_string(p.size()) + " vs " +
                          std::to_string(q.size()));
}

double kl_term(double a, double m) { return a > 0.0 ? a * std::log2(a / m) : 0.0; }

struct Outcome {
    std::optional<std::string> predicted;
    std::string truth;
};

std::vector<Outcome> pair_up(const Predictions& predictions, const Truths& truths) {
    if (truths.empty()) throw MetricError("no predictions to evaluate");
    for (const auto& [id, prediction] : predictions)
        if (!truths.contains(id)) throw MetricError("missing ground truth for respondent '" + id + "'");
    std::vector<Outcome> out;
    out.reserve(truths.size());
    for (const auto& [id, truth] : truths) {
        auto it = predictions.find(id);
        out.push_back({it == predictions.end() ? std::nullopt : it->second.most_probable(), truth});
    }
    return out;
}

}  // namespace

std::optional<ResponseDistribution> to_distribution(const methods::IndividualPrediction& prediction,
                                                    const survey::SurveyQuestion& question) {
    if (prediction.is_invalid()) return std::nullopt;
    ResponseDistribution dist(question.options.size(), 0.0);
    if (const auto* choice = prediction.choice()) {
        dist[question.index_of(choice->option_id)] = 1.0;
        return dist;
    }
    double total = 0.0;
    for (const auto& [id, p] : prediction.distribution()->probabilities) {
        dist[question.index_of(id)] += p;
        total += p;
    }
    if (!(total > 0.0)) return std::nullopt;
    for (auto& p : dist) p /= total;
    return dist;
}

double macro_f1(const Predictions& predictions, const Truths& truths) {
    const auto outcomes = pair_up(predictions, truths);
    std::set<std::string> classes;
    for (const auto& o : outcomes) classes.insert(o.truth);
    double sum = 0.0;
    for (const auto& label : classes) {
        double tp = 0, fp = 0, fn = 0;
        for (const auto& o : outcomes) {
            const bool predicted = o.predicted && *o.predicted == label;
            if (predicted && o.truth == label) ++tp;
            else if (predicted) ++fp;
            else if (o.truth == label) ++fn;
        }
        const double denom = 2 * tp + fp + fn;
        sum += denom > 0 ? 2 * tp / denom : 0.0;
    }
    return sum / static_cast<double>(classes.size());
}

double accuracy(const Predictions& predictions, const Truths& truths) {
    const auto outcomes = pair_up(predictions, truths);
    std::size_t correct = 0;
    for (const auto& o : outcomes) correct += o.predicted && *o.predicted == o.truth;
    return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q);
    return 0.5 * kernels::active_kernels().abs_diff_sum(p.data(), q.data(), p.size());
}

double wasserstein1(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q);
    std::vector<double> cdf_p(p.size());
    std::vector<double> cdf_q(q.size());
    double cp = 0.0;
    double cq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cdf_p[i] = cp += p[i];
        cdf_q[i] = cq += q[i];
    }
    // The last CDF entries are both 1 up to rounding; summing them only adds noise.
    const std::size_t ranks = p.empty() ? 0 : p.size() - 1;
    return kernels::active_kernels().abs_diff_sum(cdf_p.data(), cdf_q.data(), ranks);
}

double wasserstein1(const survey::SurveyQuestion& question, std::span<const double> p, std::span<const double> q) {
    if (question.scale_kind != survey::ScaleKind::ordinal)
        throw MetricError("1-Wasserstein distance applied to categorical question '" + question.id + "'");
    return wasserstein1(p, q);
}

double jsd(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (m <= 0.0) continue;
        sum += 0.5 * kl_term(p[i], m) + 0.5 * kl_term(q[i], m);
    }
    return std::max(0.0, sum);
}

double fleiss_kappa(const Ratings& ratings) {
    if (ratings.empty()) throw MetricError("fleiss_kappa needs at least one item");
    const std::size_t raters = ratings.front().size();
    if (raters < 2) throw MetricError("fleiss_kappa needs at least 2 raters");
    std::map<std::string, double> category_totals;
    double agreement_sum = 0.0;
    for (const auto& item : ratings) {
        if (item.size() != raters) throw MetricError("fleiss_kappa: every item needs the same number of raters");
        std::map<std::string, double> counts;
        for (const auto& label : item) counts[label] += 1.0;
        double pairs = 0.0;
        for (const auto& [label, n] : counts) {
            pairs += n * (n - 1.0);
            category_totals[label] += n;
        }
        agreement_sum += pairs / (static_cast<double>(raters) * (static_cast<double>(raters) - 1.0));
    }
    const double items = static_cast<double>(ratings.size());
    const double observed = agreement_sum / items;
    double expected = 0.0;
    for (const auto& [label, total] : category_totals) {
        const double share = total / (items * static_cast<double>(raters));
        expected += share * share;
    }
    if (expected >= 1.0) return 1.0;
    return (observed - expected) / (1.0 - expected);
}

double brier(std::span<const double> distribution, std::size_t truth_index) {
    if (truth_index >= distribution.size()) throw MetricError("brier: truth index out of range");
    std::vector<double> truth(distribution.size(), 0.0);
    truth[truth_index] = 1.0;
    return kernels::active_kernels().squared_diff_sum(distribution.data(), truth.data(), distribution.size()) /
           static_cast<double>(distribution.size());
}

double distance_correlation(const std::vector<std::vector<double>>& x, const std::vector<std::vector<double>>& y) {
    if (x.size() != y.size()) throw MetricError("distance_correlation: sample size mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw MetricError("distance_correlation needs at least 2 paired samples");
    const auto& k = kernels::active_kernels();

    auto centered = [&](const std::vector<std::vector<double>>& rows) {
        const std::size_t dim = rows.front().size();
        for (const auto& r : rows)
            if (r.size() != dim) throw MetricError("distance_correlation: rows differ in dimension");
        std::vector<double> d(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                d[i * n + j] = d[j * n + i] = std::sqrt(k.squared_diff_sum(rows[i].data(), rows[j].data(), dim));
        std::vector<double> row_mean(n, 0.0);
        std::vector<double> col_sum(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) k.accumulate(col_sum.data(), d.data() + i * n, n);
        double grand = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            row_mean[i] = col_sum[i] / static_cast<double>(n);  // symmetric matrix
            grand += col_sum[i];
        }
        grand /= static_cast<double>(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) d[i * n + j] += grand - row_mean[i] - row_mean[j];
        return d;
    };
    const auto a = centered(x);
    const auto b = centered(y);
    const double nn = static_cast<double>(n * n);
    const double dcov2 = std::max(0.0, k.dot(a.data(), b.data(), n * n) / nn);
    const double dvar_x = k.dot(a.data(), a.data(), n * n) / nn;
    const double dvar_y = k.dot(b.data(), b.data(), n * n) / nn;
    if (!(dvar_x > 0.0) || !(dvar_y > 0.0)) return 0.0;
    return std::min(1.0, std::sqrt(dcov2 / std::sqrt(dvar_x * dvar_y)));
}

}  // namespace surveysim::metrics
