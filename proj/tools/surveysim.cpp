// Command-line driver: simulate, evaluate, baseline, report, validate-config.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <stop_token>
#include <thread>

#include <CLI11.hpp>

#include "surveysim/backend/mock_backend.hpp"
#include "surveysim/harness/config.hpp"
#include "surveysim/harness/evaluate.hpp"
#include "surveysim/harness/execute.hpp"
#include "surveysim/harness/grid.hpp"
#include "surveysim/harness/store.hpp"

namespace {

using namespace surveysim;

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

struct Options {
    std::string config;
    std::string backend_profile;
    int max_in_flight = 0;
    bool dry_run = false;
    std::string out_dir;
    double threshold = -1.0;
};

harness::RunConfig load(const Options& opts) {
    if (opts.config.empty()) throw CLI::RequiredError("a config file (positional or --config)");
    auto config = harness::load_config(opts.config);
    if (!opts.backend_profile.empty()) harness::override_backend(config, opts.backend_profile);
    if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
    if (opts.max_in_flight > 0) config.max_in_flight = opts.max_in_flight;
    if (opts.threshold >= 0.0) config.threshold = opts.threshold;
    return config;
}

std::string describe(const harness::SimulationSpec& s) {
    std::string line = s.dataset_id + "\t" + s.question_id + "\t" + s.model_id + "\t" +
                       methods::to_string(s.method) + "\t" + s.variant.name() + "\t" + harness::to_string(s.decoding);
    if (s.decoding != harness::Decoding::greedy) line += "\tseed=" + std::to_string(s.seed);
    if (s.top_k) line += "\tt=" + std::to_string(s.temperature) + "\tk=" + std::to_string(*s.top_k);
    return line;
}

int simulate(const Options& opts) {
    const auto config = load(opts);
    const auto grid = harness::expand_grid(config);
    if (opts.dry_run) {
        for (const auto& cell : grid) std::cout << describe(cell) << "\n";
        std::cout << grid.size() << " cells\n";
        return 0;
    }
    const auto datasets = harness::load_datasets(config);
    harness::RunContext context{&config, &datasets, harness::make_backends(config, datasets)};
    harness::RecordStore store(config.records_dir());
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::stop_source stop;
    // Workers finish the request in hand, then the run stops; records on disk stay consistent.
    std::jthread watcher([&](std::stop_token done) {
        while (!done.stop_requested()) {
            if (g_interrupted.load()) stop.request_stop();
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
    });
    harness::ExecuteOptions options;
    options.max_in_flight = config.max_in_flight;
    options.stop = stop.get_token();
    const auto summary = harness::execute(grid, context, store, options);
    watcher.request_stop();
    std::cout << "cells " << summary.cells << ", tasks " << summary.tasks << ", completed " << summary.completed
              << ", failed " << summary.failed << ", skipped " << summary.skipped << "\n";
    if (summary.interrupted) {
        std::cerr << "interrupted; rerun the same command to resume\n";
        return 130;
    }
    return 0;
}

harness::Evaluation run_evaluation(const harness::RunConfig& config) {
    const auto datasets = harness::load_datasets(config);
    if (!std::filesystem::exists(config.records_dir())) throw std::runtime_error("no records found");
    harness::RecordStore store(config.records_dir());
    const auto records = store.load_all();
    if (records.empty()) throw std::runtime_error("no records found in " + config.records_dir().string());
    return harness::evaluate(datasets, records, config.threshold, config.baseline_seed);
}

int evaluate(const Options& opts) {
    const auto config = load(opts);
    const auto evaluation = run_evaluation(config);
    std::filesystem::create_directories(config.reports_dir());
    std::ofstream(config.reports_dir() / "metrics.csv", std::ios::binary) << harness::metrics_csv(evaluation);
    std::size_t gated = 0;
    for (const auto& row : evaluation.specs) gated += row.metrics.gated;
    std::cout << evaluation.specs.size() << " cells evaluated, " << gated << " gated; wrote "
              << (config.reports_dir() / "metrics.csv").string() << "\n";
    return 0;
}

int report(const Options& opts) {
    const auto config = load(opts);
    const auto evaluation = run_evaluation(config);
    harness::write_reports(evaluation, config.reports_dir());
    std::cout << "wrote reports to " << config.reports_dir().string() << "\n";
    return 0;
}

int baseline(const Options& opts) {
    const auto config = load(opts);
    const auto rows = harness::evaluate_baselines(harness::load_datasets(config), config.baseline_seed, config.threshold);
    harness::Evaluation evaluation;
    evaluation.threshold = config.threshold;
    evaluation.baselines = rows;
    std::filesystem::create_directories(config.reports_dir());
    std::ofstream(config.reports_dir() / "baseline.csv", std::ios::binary) << harness::metrics_csv(evaluation);
    for (const auto& row : rows) {
        std::printf("%s\t%s\tmacro_f1=%.4f\taccuracy=%.4f\t%s=%.4f\n", row.dataset_id.c_str(),
                    row.question_id.c_str(), row.metrics.macro_f1, row.metrics.accuracy,
                    metrics::to_string(row.metrics.distance_kind).c_str(), row.metrics.mean_distance.value_or(0.0));
    }
    return 0;
}

int validate_config(const Options& opts) {
    const auto config = load(opts);
    const auto datasets = harness::load_datasets(config);
    for (const auto& [name, profile] : config.backends)
        if (profile.kind == harness::BackendKind::mock) backend::load_mock_script(profile.mock_script);
    const auto grid = harness::expand_grid(config);
    std::size_t respondents = 0;
    for (const auto& d : datasets) respondents += d.respondents.size();
    std::cout << "config ok: " << datasets.size() << " dataset(s), " << respondents << " respondents, "
              << config.models.size() << " model(s), " << grid.size() << " cells\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Survey response simulation with language models"};
    app.require_subcommand(1);
    Options opts;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config,--config", opts.config, "run configuration (YAML)");
        cmd->add_option("--out-dir", opts.out_dir, "override the output directory");
    };
    auto* sim = app.add_subcommand("simulate", "run the simulation grid (resumes an interrupted run)");
    add_common(sim);
    sim->add_option("--backend-profile", opts.backend_profile, "run every model on this backend profile");
    sim->add_option("--max-in-flight", opts.max_in_flight, "concurrent requests")->check(CLI::PositiveNumber);
    sim->add_flag("--dry-run", opts.dry_run, "print the grid without executing");

    auto* eval = app.add_subcommand("evaluate", "compute metrics from stored records");
    add_common(eval);
    eval->add_option("--threshold", opts.threshold, "invalid fraction above which cells are gated")
        ->check(CLI::Range(0.0, 1.0));

    auto* rep = app.add_subcommand("report", "write metrics.csv, summary.md and plot data");
    add_common(rep);
    rep->add_option("--threshold", opts.threshold, "invalid fraction above which cells are gated")
        ->check(CLI::Range(0.0, 1.0));

    auto* base = app.add_subcommand("baseline", "score the stratified baseline");
    add_common(base);

    auto* val = app.add_subcommand("validate-config", "check a configuration and its inputs");
    add_common(val);
    val->add_option("--backend-profile", opts.backend_profile, "check with every model on this backend profile");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*sim) return simulate(opts);
        if (*eval) return evaluate(opts);
        if (*rep) return report(opts);
        if (*base) return baseline(opts);
        if (*val) return validate_config(opts);
    } catch (const CLI::Error& e) {
        std::cerr << "error: missing " << e.what() << "\nrun with --help for usage\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
