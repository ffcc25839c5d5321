#include "surveysim/harness/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "surveysim/survey/baseline.hpp"
#include "surveysim/survey/dataset.hpp"

namespace surveysim::harness {

namespace fs = std::filesystem;

std::string to_string(Facet facet) { return facet == Facet::variant ? "variant" : "seed"; }

namespace {

const survey::Dataset& find_dataset(const std::vector<survey::Dataset>& datasets, const std::string& id) {
    for (const auto& d : datasets)
        if (d.schema.id == id) return d;
    throw EvaluationError("records name unknown dataset '" + id + "'");
}

const survey::SurveyQuestion& find_question(const survey::Dataset& dataset, const std::string& id) {
    for (const auto& q : dataset.schema.questions)
        if (q.id == id) return q;
    throw EvaluationError("records name unknown question '" + id + "' of dataset '" + dataset.schema.id + "'");
}

metrics::Truths truths_for(const survey::Dataset& dataset, const std::string& question_id) {
    metrics::Truths truths;
    for (const auto* r : survey::respondents_for(dataset, question_id)) truths[r->id] = *r->truth(question_id);
    return truths;
}

auto order_key(const SimulationSpec& s) {
    return std::make_tuple(s.dataset_id, s.question_id, s.model_id, static_cast<int>(s.method),
                           static_cast<int>(s.variant.labeling), static_cast<int>(s.variant.order),
                           static_cast<int>(s.decoding), s.temperature, s.top_k.value_or(-1), s.seed);
}

bool spec_less(const SimulationSpec& a, const SimulationSpec& b) { return order_key(a) < order_key(b); }

std::string number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    std::string text = buffer;
    return text == "-0" ? "0" : text;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_line(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    return out + "\n";
}

std::vector<std::string> spec_columns(const SimulationSpec& s) {
    return {s.dataset_id,
            s.question_id,
            s.model_id,
            methods::to_string(s.method),
            s.variant.name(),
            to_string(s.decoding),
            s.decoding == Decoding::greedy ? std::string("") : std::to_string(s.seed),
            s.decoding == Decoding::greedy ? std::string("") : number(s.temperature),
            s.top_k ? std::to_string(*s.top_k) : std::string("")};
}

void emit_metrics(std::string& out, const std::vector<std::string>& prefix, const metrics::SpecMetrics& m) {
    auto row = [&](const std::string& metric, const std::string& subpop, const std::string& value) {
        auto fields = prefix;
        fields.push_back(metric);
        fields.push_back(subpop);
        fields.push_back(value);
        out += csv_line(fields);
    };
    const std::string dist = metrics::to_string(m.distance_kind);
    row("n", "", std::to_string(m.respondents));
    row("macro_f1", "", number(m.macro_f1));
    row("accuracy", "", number(m.accuracy));
    row("invalid_fraction", "", number(m.invalid_fraction));
    row("partial_fraction", "", number(m.partial_fraction));
    row("gated", "", m.gated ? "1" : "0");
    if (m.population_distance) row(dist, "all", number(*m.population_distance));
    if (m.population_jsd) row("jsd", "all", number(*m.population_jsd));
    for (const auto& s : m.subpopulations) {
        const auto label = s.key.label();
        row("size", label, std::to_string(s.size));
        if (s.distance) row(dist, label, number(*s.distance));
        if (s.jsd) row("jsd", label, number(*s.jsd));
    }
    if (m.mean_distance) row("mean_" + dist, "", number(*m.mean_distance));
    if (m.weighted_mean_distance) row("weighted_mean_" + dist, "", number(*m.weighted_mean_distance));
    if (m.mean_jsd) row("mean_jsd", "", number(*m.mean_jsd));
    if (m.dcor) row("dcor", "", number(*m.dcor));
    if (m.brier) row("brier", "", number(*m.brier));
}

struct Stats {
    std::size_t n = 0;
    double sum = 0.0;
    double min = 0.0;
    double max = 0.0;

    void add(double v) {
        if (n == 0) min = max = v;
        min = std::min(min, v);
        max = std::max(max, v);
        sum += v;
        ++n;
    }
    double mean() const { return n ? sum / static_cast<double>(n) : 0.0; }
};

// Cell identity with the seed removed: one point of a Figure-2 style panel.
auto seedless_key(const SimulationSpec& s) {
    auto copy = s;
    copy.seed = 0;
    return order_key(copy);
}

std::string plot_csv(const Evaluation& evaluation, const std::function<std::optional<double>(const SpecRow&)>& pick) {
    std::map<decltype(seedless_key(SimulationSpec{})), std::pair<const SimulationSpec*, Stats>> groups;
    for (const auto& row : evaluation.specs) {
        auto& entry = groups[seedless_key(row.spec)];
        if (!entry.first) entry.first = &row.spec;
        if (const auto value = pick(row)) entry.second.add(*value);
    }
    std::string out = csv_line({"dataset", "question", "model", "method", "variant", "decoding", "temperature",
                                "top_k", "cells", "mean", "min", "max"});
    for (const auto& [key, entry] : groups) {
        const auto& s = *entry.first;
        const auto& st = entry.second;
        if (st.n == 0) continue;
        out += csv_line({s.dataset_id, s.question_id, s.model_id, methods::to_string(s.method), s.variant.name(),
                         to_string(s.decoding), s.decoding == Decoding::greedy ? "" : number(s.temperature),
                         s.top_k ? std::to_string(*s.top_k) : "", std::to_string(st.n), number(st.mean()),
                         number(st.min), number(st.max)});
    }
    return out;
}

std::string kappa_plot_csv(const Evaluation& evaluation) {
    std::string out = csv_line({"dataset", "question", "model", "method", "facet", "variant", "decoding",
                                "temperature", "top_k", "seed", "raters", "kappa"});
    for (const auto& r : evaluation.robustness) {
        if (!r.kappa) continue;
        const auto& s = r.group;
        const bool variant_facet = r.facet == Facet::variant;
        out += csv_line({s.dataset_id, s.question_id, s.model_id, methods::to_string(s.method), to_string(r.facet),
                         variant_facet ? "*" : s.variant.name(), to_string(s.decoding),
                         s.decoding == Decoding::greedy ? "" : number(s.temperature),
                         s.top_k ? std::to_string(*s.top_k) : "",
                         !variant_facet ? "*" : (s.decoding == Decoding::greedy ? "" : std::to_string(s.seed)),
                         std::to_string(r.raters.size()), number(*r.kappa)});
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw EvaluationError("cannot write '" + path.string() + "'");
}

std::string cell(const std::optional<double>& value, bool gated) {
    if (gated) return "gated";
    return value ? number(*value) : "-";
}

}  // namespace

std::vector<BaselineRow> evaluate_baselines(const std::vector<survey::Dataset>& datasets, std::uint64_t seed,
                                            double threshold) {
    std::vector<BaselineRow> rows;
    for (const auto& dataset : datasets) {
        const auto groups = metrics::build_subpopulations(dataset);
        for (const auto& question : dataset.schema.questions) {
            const auto truths = truths_for(dataset, question.id);
            if (truths.empty()) continue;
            metrics::Predictions predictions;
            for (const auto& [id, option] : survey::stratified_baseline(dataset, question.id, seed))
                predictions.emplace(id, methods::IndividualPrediction{methods::Choice{option}, option, std::nullopt});
            rows.push_back({dataset.schema.id, question.id, seed,
                            metrics::apply_exclusion(
                                metrics::compute_spec_metrics(question, predictions, truths, groups), threshold)});
        }
    }
    return rows;
}

Evaluation evaluate(const std::vector<survey::Dataset>& datasets, const std::vector<methods::RunRecord>& records,
                    double threshold, std::uint64_t baseline_seed) {
    Evaluation out;
    out.threshold = threshold;

    std::map<std::string, std::pair<SimulationSpec, metrics::Predictions>> cells;
    for (const auto& record : records) {
        auto& cell = cells[record.spec.key()];
        cell.first = record.spec;
        cell.second.emplace(record.respondent_id, record.prediction);
    }

    std::map<std::string, metrics::Subpopulations> groups;
    std::set<std::pair<std::string, std::string>> evaluated;
    std::map<std::string, const metrics::Predictions*> predictions_by_key;
    for (const auto& [key, cell] : cells) {
        const auto& [spec, predictions] = cell;
        const auto& dataset = find_dataset(datasets, spec.dataset_id);
        const auto& question = find_question(dataset, spec.question_id);
        const auto truths = truths_for(dataset, question.id);
        for (const auto& [id, prediction] : predictions)
            if (!truths.contains(id))
                throw EvaluationError("missing ground truth for respondent '" + id + "' on question '" + question.id +
                                      "'");
        if (!groups.contains(dataset.schema.id)) groups[dataset.schema.id] = metrics::build_subpopulations(dataset);
        auto m = metrics::compute_spec_metrics(question, predictions, truths, groups.at(dataset.schema.id));
        out.specs.push_back({spec, metrics::apply_exclusion(std::move(m), threshold)});
        evaluated.insert({spec.dataset_id, spec.question_id});
        predictions_by_key[key] = &predictions;
    }
    std::sort(out.specs.begin(), out.specs.end(),
              [](const SpecRow& a, const SpecRow& b) { return spec_less(a.spec, b.spec); });

    for (auto& row : evaluate_baselines(datasets, baseline_seed, threshold))
        if (evaluated.contains({row.dataset_id, row.question_id})) out.baselines.push_back(std::move(row));

    // Group cells that differ only in the facet field; each group is one kappa.
    for (Facet facet : {Facet::variant, Facet::seed}) {
        std::map<decltype(order_key(SimulationSpec{})), std::vector<const SpecRow*>> members;
        for (const auto& row : out.specs) {
            if (facet == Facet::seed && row.spec.decoding == Decoding::greedy) continue;
            auto group = row.spec;
            if (facet == Facet::variant) group.variant = {};
            else group.seed = 0;
            members[order_key(group)].push_back(&row);
        }
        for (const auto& [key, rows] : members) {
            if (rows.size() < 2) continue;
            RobustnessRow r;
            r.facet = facet;
            r.group = rows.front()->spec;
            std::vector<const metrics::Predictions*> raters;
            for (const auto* row : rows) {
                r.raters.push_back(facet == Facet::variant ? row->spec.variant.name() : std::to_string(row->spec.seed));
                raters.push_back(predictions_by_key.at(row->spec.key()));
                r.gated = r.gated || row->metrics.gated;
            }
            const auto& dataset = find_dataset(datasets, r.group.dataset_id);
            std::vector<std::string> items;
            for (const auto* respondent : survey::respondents_for(dataset, r.group.question_id))
                items.push_back(respondent->id);
            r.items = items.size();
            if (!r.gated && !items.empty()) r.kappa = metrics::fleiss_kappa(metrics::build_ratings(raters, items));
            out.robustness.push_back(std::move(r));
        }
    }
    return out;
}

std::string metrics_csv(const Evaluation& evaluation) {
    std::string out = csv_line({"dataset", "question", "model", "method", "variant", "decoding", "seed", "temperature",
                                "top_k", "metric", "subpopulation", "value"});
    for (const auto& row : evaluation.baselines)
        emit_metrics(out,
                     {row.dataset_id, row.question_id, "", "stratified_baseline", "", "", std::to_string(row.seed), "",
                      ""},
                     row.metrics);
    for (const auto& row : evaluation.specs) emit_metrics(out, spec_columns(row.spec), row.metrics);
    for (const auto& r : evaluation.robustness) {
        auto columns = spec_columns(r.group);
        if (r.facet == Facet::variant) columns[4] = "*";
        else columns[6] = "*";
        auto fields = columns;
        fields.insert(fields.end(), {"fleiss_kappa_" + to_string(r.facet), "",
                                     r.kappa ? number(*r.kappa) : std::string("gated")});
        out += csv_line(fields);
    }
    return out;
}

std::string summary_markdown(const Evaluation& evaluation) {
    std::ostringstream md;
    md << "# Simulation report\n\n";
    md << "Cells whose invalid fraction exceeds " << number(evaluation.threshold)
       << " are gated: their alignment, calibration and robustness scores are not reported.\n";

    std::vector<std::pair<std::string, std::string>> sections;
    for (const auto& row : evaluation.specs) {
        const std::pair<std::string, std::string> id{row.spec.dataset_id, row.spec.question_id};
        if (sections.empty() || sections.back() != id) sections.push_back(id);
    }
    for (const auto& b : evaluation.baselines) {
        const std::pair<std::string, std::string> id{b.dataset_id, b.question_id};
        if (std::find(sections.begin(), sections.end(), id) == sections.end()) sections.push_back(id);
    }

    for (const auto& [dataset, question] : sections) {
        md << "\n## " << dataset << " / " << question << "\n\n";
        md << "| model | method | variant | decoding | seed | macro F1 | accuracy | invalid | partial | distance | JSD | "
              "dCor | Brier |\n";
        md << "|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
        auto metric_cells = [&](const metrics::SpecMetrics& m) {
            md << number(m.macro_f1) << " | " << number(m.accuracy) << " | " << number(m.invalid_fraction) << " | "
               << number(m.partial_fraction) << " | " << cell(m.mean_distance, m.gated) << " | "
               << cell(m.mean_jsd, m.gated) << " | " << cell(m.dcor, m.gated) << " | " << cell(m.brier, m.gated)
               << " |\n";
        };
        for (const auto& b : evaluation.baselines) {
            if (b.dataset_id != dataset || b.question_id != question) continue;
            md << "| - | stratified_baseline | - | - | " << b.seed << " | ";
            metric_cells(b.metrics);
        }
        std::map<std::tuple<std::string, int, int>, std::pair<Stats, Stats>> by_method;
        for (const auto& row : evaluation.specs) {
            const auto& s = row.spec;
            if (s.dataset_id != dataset || s.question_id != question) continue;
            md << "| " << s.model_id << " | " << methods::to_string(s.method) << " | " << s.variant.name() << " | "
               << to_string(s.decoding);
            if (s.decoding == Decoding::sweep) md << " (t=" << number(s.temperature) << ", k=" << *s.top_k << ")";
            md << " | " << (s.decoding == Decoding::greedy ? "-" : std::to_string(s.seed)) << " | ";
            metric_cells(row.metrics);
            auto& agg = by_method[{s.model_id, static_cast<int>(s.method), static_cast<int>(s.decoding)}];
            agg.first.add(row.metrics.macro_f1);
            if (row.metrics.mean_distance) agg.second.add(*row.metrics.mean_distance);
        }
        if (!by_method.empty()) {
            md << "\nAggregated view: mean over scale variants and seeds (distance over non-gated cells).\n\n";
            md << "| model | method | decoding | cells | mean macro F1 | mean distance |\n";
            md << "|---|---|---|---|---|---|\n";
            for (const auto& [key, agg] : by_method) {
                const auto& [model, method, decoding] = key;
                md << "| " << model << " | " << methods::to_string(static_cast<methods::MethodId>(method)) << " | "
                   << to_string(static_cast<Decoding>(decoding)) << " | " << agg.first.n << " | "
                   << number(agg.first.mean()) << " | " << (agg.second.n ? number(agg.second.mean()) : "-")
                   << " |\n";
            }
        }
        bool header = false;
        for (const auto& r : evaluation.robustness) {
            const auto& s = r.group;
            if (s.dataset_id != dataset || s.question_id != question) continue;
            if (!header) {
                md << "\nFleiss' kappa across raters.\n\n";
                md << "| model | method | facet | fixed | raters | kappa |\n|---|---|---|---|---|---|\n";
                header = true;
            }
            std::string fixed = r.facet == Facet::variant
                                    ? to_string(s.decoding) + (s.decoding == Decoding::greedy
                                                                   ? std::string()
                                                                   : " seed " + std::to_string(s.seed))
                                    : s.variant.name() + " " + to_string(s.decoding);
            if (s.top_k) fixed += " t=" + number(s.temperature) + " k=" + std::to_string(*s.top_k);
            std::string raters;
            for (const auto& name : r.raters) raters += (raters.empty() ? "" : ", ") + name;
            md << "| " << s.model_id << " | " << methods::to_string(s.method) << " | " << to_string(r.facet) << " | "
               << fixed << " | " << raters << " | " << (r.kappa ? number(*r.kappa) : "gated") << " |\n";
        }
    }
    return md.str();
}

void write_reports(const Evaluation& evaluation, const fs::path& reports_dir) {
    std::error_code ec;
    fs::create_directories(reports_dir / "plotdata", ec);
    if (ec) throw EvaluationError("cannot create '" + reports_dir.string() + "': " + ec.message());
    write_file(reports_dir / "metrics.csv", metrics_csv(evaluation));
    write_file(reports_dir / "summary.md", summary_markdown(evaluation));
    write_file(reports_dir / "plotdata" / "macro_f1.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return std::optional<double>(r.metrics.macro_f1); }));
    write_file(reports_dir / "plotdata" / "accuracy.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return std::optional<double>(r.metrics.accuracy); }));
    write_file(reports_dir / "plotdata" / "invalid_fraction.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return std::optional<double>(r.metrics.invalid_fraction); }));
    write_file(reports_dir / "plotdata" / "partial_fraction.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return std::optional<double>(r.metrics.partial_fraction); }));
    write_file(reports_dir / "plotdata" / "subpopulation_distance.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return r.metrics.mean_distance; }));
    write_file(reports_dir / "plotdata" / "jsd.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return r.metrics.mean_jsd; }));
    write_file(reports_dir / "plotdata" / "dcor.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return r.metrics.dcor; }));
    write_file(reports_dir / "plotdata" / "brier.csv",
               plot_csv(evaluation, [](const SpecRow& r) { return r.metrics.brier; }));
    write_file(reports_dir / "plotdata" / "fleiss_kappa.csv", kappa_plot_csv(evaluation));
}

}  // namespace surveysim::harness
