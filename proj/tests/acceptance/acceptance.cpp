// One line per acceptance criterion. Exit status is nonzero when any fails.
// Criterion 9 talks to a real endpoint and runs only when SURVEYSIM_LIVE_URL is set.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>

#include "surveysim/backend/http_backend.hpp"
#include "surveysim/backend/mock_backend.hpp"
#include "surveysim/harness/config.hpp"
#include "surveysim/harness/evaluate.hpp"
#include "surveysim/harness/execute.hpp"
#include "surveysim/harness/grid.hpp"
#include "surveysim/metrics/spec_metrics.hpp"
#include "surveysim/methods/run_method.hpp"
#include "surveysim/methods/schemas.hpp"
#include "surveysim/survey/baseline.hpp"
#include "surveysim/survey/dataset.hpp"
#include "surveysim/survey/scale.hpp"
#include "surveysim/token_map/token_map.hpp"
#include "test_support.hpp"

using namespace surveysim;
using testing_support::fixture;
namespace oracle = testing_support::oracle;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status = Status::pass;
    std::string detail;
};

// Collects the first failed check of a criterion.
class Checks {
public:
    void require(bool ok, const std::string& what) {
        ++count_;
        if (!ok && failure_.empty()) failure_ = what;
    }
    void near(double got, double want, double tol, const std::string& what) {
        if (std::fabs(got - want) > tol) {
            std::ostringstream os;
            os << what << ": got " << got << ", want " << want;
            require(false, os.str());
        } else {
            require(true, what);
        }
    }
    Outcome outcome(const std::string& summary) const {
        if (!failure_.empty()) return {Status::fail, failure_};
        return {Status::pass, summary + " (" + std::to_string(count_) + " checks)"};
    }

private:
    std::size_t count_ = 0;
    std::string failure_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* format, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, format, value);
    return buffer;
}

struct Run {
    harness::RunConfig config;
    std::vector<survey::Dataset> datasets;
    harness::RunContext context;
};

std::unique_ptr<Run> prepare(const std::string& config_name, const std::filesystem::path& out_dir) {
    auto run = std::make_unique<Run>();
    run->config = harness::load_config(fixture(config_name));
    run->config.out_dir = out_dir;
    run->datasets = harness::load_datasets(run->config);
    run->context.config = &run->config;
    run->context.datasets = &run->datasets;
    run->context.backends = harness::make_backends(run->config, run->datasets);
    return run;
}

methods::IndividualPrediction choice(const std::string& id) { return {methods::Choice{id}, "", std::nullopt}; }

Outcome metric_oracles() {
    Checks c;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    constexpr int kFixtures = 250;
    for (int i = 0; i < kFixtures; ++i) {
        const std::size_t n = 2 + rng() % 5;  // 2..6 options
        const auto p = testing_support::random_distribution(rng, n);
        const auto q = testing_support::random_distribution(rng, n);
        c.near(metrics::tv_distance(p, q), oracle::tv_by_subsets(p, q), 1e-9, "tv");
        c.near(metrics::wasserstein1(p, q), oracle::w1_by_quantiles(p, q), 1e-9, "wasserstein1");
        c.near(metrics::jsd(p, q), oracle::jsd_by_entropy(p, q), 1e-9, "jsd");
        const std::size_t truth = rng() % n;
        c.near(metrics::brier(p, truth), oracle::brier_loop(p, truth), 1e-9, "brier");

        const std::size_t items = 1 + rng() % 50, raters = 2 + rng() % 4;
        metrics::Ratings ratings(items, std::vector<std::string>(raters));
        for (auto& row : ratings)
            for (auto& r : row) r = std::string(1, static_cast<char>('a' + rng() % n));
        c.near(metrics::fleiss_kappa(ratings), oracle::kappa_by_pairs(ratings), 1e-9, "fleiss_kappa");

        const std::size_t samples = 2 + rng() % 49;  // 2..50
        std::vector<std::vector<double>> x, y;
        for (std::size_t k = 0; k < samples; ++k) {
            x.push_back(testing_support::random_distribution(rng, n, false));
            y.push_back(testing_support::random_distribution(rng, 2 + rng() % 5, false));
        }
        // Rows of y need a common dimension.
        for (auto& row : y) row.resize(y.front().size(), 0.0);
        c.near(metrics::distance_correlation(x, y), oracle::dcor_brute(x, y), 1e-12, "distance_correlation");
    }
    const double elapsed = seconds_since(start);
    c.require(elapsed < 30.0, "runtime " + fmt("%.1f s", elapsed) + " exceeds 30 s");
    return c.outcome(std::to_string(kFixtures) + " fixtures x 6 metrics in " + fmt("%.2f s", elapsed));
}

Outcome echo_end_to_end() {
    Checks c;
    const auto start = std::chrono::steady_clock::now();
    testing_support::TempDir dir("accept-echo");
    auto run = prepare("echo.yaml", dir.path());
    const auto grid = harness::expand_grid(run->config);
    harness::RecordStore store(run->config.records_dir());
    const auto summary = harness::execute(grid, run->context, store, {});
    c.require(summary.failed == 0, "backend failures in echo run");
    const auto eval = harness::evaluate(run->datasets, store.load_all(), run->config.threshold, 0);
    c.require(eval.specs.size() == grid.size(), "cell count");
    std::size_t methods_seen = 0;
    for (const auto& row : eval.specs) {
        const auto& m = row.metrics;
        const auto cell = row.spec.canonical();
        c.near(m.macro_f1, 1.0, 1e-9, "macro_f1 " + cell);
        c.near(m.accuracy, 1.0, 1e-9, "accuracy " + cell);
        c.near(m.invalid_fraction, 0.0, 1e-9, "invalid_fraction " + cell);
        c.require(m.brier.has_value(), "brier missing " + cell);
        if (m.brier) c.near(*m.brier, 0.0, 1e-9, "brier " + cell);
        c.require(m.dcor.has_value(), "dcor missing " + cell);
        if (m.dcor) c.near(*m.dcor, 1.0, 1e-9, "dcor " + cell);
        c.require(!m.subpopulations.empty(), "no subpopulations " + cell);
        for (const auto& s : m.subpopulations) {
            c.require(s.distance && s.jsd, "unscored subpopulation " + s.key.label());
            if (s.distance) c.near(*s.distance, 0.0, 1e-9, "distance " + s.key.label() + " " + cell);
            if (s.jsd) c.near(*s.jsd, 0.0, 1e-9, "jsd " + s.key.label() + " " + cell);
        }
        methods_seen += row.spec.variant.name() == "full_text_original" && row.spec.question_id == "vote";
    }
    c.require(methods_seen == methods::kAllMethods.size(), "grid does not cover all 8 methods");
    const double elapsed = seconds_since(start);
    c.require(elapsed < 60.0, "runtime " + fmt("%.1f s", elapsed) + " exceeds 60 s");
    return c.outcome(std::to_string(grid.size()) + " cells x " + std::to_string(summary.tasks / grid.size()) +
                     " respondents in " + fmt("%.2f s", elapsed));
}

Outcome stratified_baseline() {
    Checks c;
    testing_support::TempDir dir("accept-baseline");
    auto run = prepare("echo.yaml", dir.path());
    const auto& dataset = run->datasets.front();
    const auto& question = dataset.schema.question("vote");
    metrics::Truths truths;
    std::map<std::string, double> marginal;
    for (const auto* r : survey::respondents_for(dataset, "vote")) {
        truths[r->id] = *r->truth("vote");
        marginal[truths[r->id]] += 1.0;
    }
    double chance = 0.0;
    for (const auto& [id, count] : marginal) chance += (count / truths.size()) * (count / truths.size());

    double accuracy_sum = 0.0;
    constexpr int kSeeds = 1000;
    for (int seed = 0; seed < kSeeds; ++seed) {
        metrics::Predictions preds;
        for (const auto& [id, option] : survey::stratified_baseline(dataset, "vote", seed)) preds[id] = choice(option);
        const auto m = metrics::compute_spec_metrics(question, preds, truths, {});
        c.require(m.population_distance && *m.population_distance == 0.0,
                  "population TV nonzero at seed " + std::to_string(seed));
        accuracy_sum += m.accuracy;
    }
    const double mean = accuracy_sum / kSeeds;
    c.near(mean, chance, 0.02, "mean accuracy vs chance level");
    return c.outcome("TV = 0 on all " + std::to_string(kSeeds) + " seeds; mean accuracy " + fmt("%.4f", mean) +
                     " vs sum p_i^2 = " + fmt("%.4f", chance));
}

Outcome token_aggregation() {
    Checks c;
    using backend::TokenLogprob;
    const auto index = token_map::build_index(survey::render_scale(testing_support::vote_question(), {}));
    auto tokens = [](std::vector<std::pair<std::string, double>> probs) {
        std::vector<TokenLogprob> out;
        for (const auto& [t, p] : probs) out.push_back({t, std::log(p)});
        return out;
    };
    const auto full = token_map::aggregate_first_token(tokens({{"Don", 0.4}, {"Tru", 0.3}, {"Cl", 0.2}, {"Non", 0.1}}), index);
    c.near(full.distribution.at("trump"), 0.7, 1e-12, "Don/Tru -> trump");
    c.near(full.distribution.at("clinton"), 0.2, 1e-12, "Cl -> clinton");
    c.near(full.distribution.at("non_voter"), 0.1, 1e-12, "Non -> non_voter");
    c.require(full.validity == token_map::Validity::full, "full coverage expected");

    const auto partial = token_map::aggregate_first_token(tokens({{"Tru", 0.6}, {"Cl", 0.2}}), index);
    c.near(partial.distribution.at("trump"), 0.75, 1e-12, "partial trump");
    c.near(partial.distribution.at("clinton"), 0.25, 1e-12, "partial clinton");
    c.near(partial.distribution.at("non_voter"), 0.0, 1e-12, "partial non_voter");
    c.require(partial.validity == token_map::Validity::partial, "partial coverage expected");

    survey::SurveyQuestion parties;
    parties.id = "party";
    parties.options = {{"cdu", "CDU", {}}, {"csu", "CSU", {}}, {"spd", "SPD", {}}};
    const auto party_index = token_map::build_index(survey::render_scale(parties, {}));
    const auto ambiguous = token_map::aggregate_first_token(tokens({{"C", 0.5}, {"CD", 0.3}, {"S", 0.2}}), party_index);
    c.near(ambiguous.distribution.at("cdu"), 0.6, 1e-12, "ambiguous C excluded (cdu)");
    c.near(ambiguous.distribution.at("spd"), 0.4, 1e-12, "ambiguous C excluded (spd)");
    c.near(ambiguous.distribution.at("csu"), 0.0, 1e-12, "ambiguous C excluded (csu)");
    const auto only_ambiguous = token_map::aggregate_first_token(tokens({{"C", 1.0}}), party_index);
    c.require(only_ambiguous.validity == token_map::Validity::invalid, "all-ambiguous mass must be invalid");
    return c.outcome("{0.7, 0.2, 0.1}, {0.75, 0.25, 0} and ambiguous tokens reproduced");
}

Outcome validity_and_exclusion() {
    Checks c;
    testing_support::TempDir dir("accept-garbage");
    auto run = prepare("garbage.yaml", dir.path());
    harness::RecordStore store(run->config.records_dir());
    harness::execute(harness::expand_grid(run->config), run->context, store, {});
    const auto eval = harness::evaluate(run->datasets, store.load_all(), 0.10, 0);
    for (const auto& row : eval.specs) {
        const auto& m = row.metrics;
        c.near(m.invalid_fraction, 1.0, 0.0, "garbage invalid_fraction " + row.spec.canonical());
        c.require(m.gated && !m.population_distance && !m.mean_distance && !m.dcor && !m.brier && m.subpopulations.empty(),
                  "garbage cell not gated " + row.spec.canonical());
    }

    // 100 respondents; the first k get garbage from the mock, the rest their truth.
    survey::DatasetSchema schema;
    schema.id = "mixed";
    schema.attributes = {{"group", "group", survey::AttributeKind::text, {}}};
    auto question = testing_support::vote_question();
    schema.questions = {question};
    const std::vector<std::string> ids{"clinton", "trump", "non_voter"};
    std::vector<survey::Respondent> respondents;
    backend::TruthTable table;
    metrics::Truths truths;
    metrics::Subpopulations groups;
    for (int i = 0; i < 100; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "m%03d", i);
        const auto truth = ids[i % 3];
        respondents.push_back({id, {{"group", i % 2 ? "odd" : "even"}}, {{"vote", truth}}});
        table[{"vote", id}] = truth;
        truths[id] = truth;
        groups[{"group", i % 2 ? "odd" : "even"}].push_back(id);
    }
    survey::TemplateSet templates{"I am in group {group}.", "|"};
    harness::SimulationSpec spec;
    spec.dataset_id = "mixed";
    spec.question_id = "vote";
    spec.model_id = "mock";
    std::string summary = "garbage: " + std::to_string(eval.specs.size()) + " cells gated";
    for (int invalid : {10, 11}) {
        backend::MockScript script;
        backend::MockRule garbage;
        for (int i = 0; i < invalid; ++i) garbage.match.respondents.push_back(respondents[i].id);
        garbage.behavior.kind = backend::MockBehaviorKind::garbage;
        script.rules.push_back(garbage);
        script.fallback = backend::MockBehavior{};
        backend::MockBackend mock(script, table);
        methods::OpenCache cache;
        methods::MethodEnvironment env;
        env.schema = &schema;
        env.templates = &templates;
        env.backend = &mock;
        env.open_cache = &cache;
        for (auto method : methods::kAllMethods) {
            spec.method = method;
            metrics::Predictions preds;
            for (const auto& r : respondents) preds[r.id] = methods::run_method(spec, r, env).prediction;
            const auto m = metrics::apply_exclusion(metrics::compute_spec_metrics(question, preds, truths, groups), 0.10);
            const auto name = methods::to_string(method);
            c.near(m.invalid_fraction, invalid / 100.0, 1e-15, name + " invalid_fraction");
            if (invalid == 10)
                c.require(!m.gated && m.mean_distance.has_value(), name + ": 10% invalid must be retained");
            else
                c.require(m.gated && !m.mean_distance.has_value(), name + ": 11% invalid must be gated");
        }
    }
    return c.outcome(summary + "; 10% retained, 11% gated for all 8 methods");
}

Outcome schema_conformance() {
    Checks c;
    std::mt19937_64 rng(6);
    const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ -_'";
    std::size_t rejected = 0, accepted = 0;
    for (auto variant : survey::ScaleVariant::all()) {
        for (const auto& question : {testing_support::vote_question(), testing_support::likert_question(5)}) {
            const auto presented = survey::render_scale(question, variant);
            const auto labels = presented.labels();
            for (const auto& label : labels) {
                const nlohmann::ordered_json body = {{"answer_option", label}};
                for (const auto& wrapped : {body.dump(), "```json\n" + body.dump(2) + "\n```",
                                            "Here is my answer:\n```\n" + body.dump() + "\n```\nThanks."}) {
                    const auto p = methods::parse_choice(wrapped, presented);
                    c.require(p.choice() && p.choice()->option_id == *presented.option_for_label(label),
                              "enum value not accepted: " + wrapped);
                    ++accepted;
                }
            }
            for (int i = 0; i < 1000; ++i) {
                std::string s;
                const auto len = rng() % 10;
                for (std::size_t k = 0; k < len; ++k) s += alphabet[rng() % alphabet.size()];
                if (i % 3 == 0) s = labels[rng() % labels.size()] + s;
                if (i % 7 == 0) s = " " + labels[rng() % labels.size()];
                if (std::find(labels.begin(), labels.end(), s) != labels.end()) continue;
                const nlohmann::ordered_json body = {{"answer_option", s}};
                c.require(methods::parse_choice(body.dump(), presented).is_invalid(), "out-of-enum accepted: " + s);
                ++rejected;
            }

            std::uniform_real_distribution<double> u(0.0, 10.0);
            for (int i = 0; i < 300; ++i) {
                nlohmann::ordered_json body = nlohmann::ordered_json::object();
                const int mode = i % 5;  // 0: zeros, 1: negative, else non-negative
                bool any_positive = false;
                for (const auto& label : labels) {
                    double v = mode == 0 ? 0.0 : (rng() % 4 == 0 ? 0.0 : u(rng));
                    if (mode == 1 && &label == &labels.front()) v = -0.5;
                    any_positive = any_positive || v > 0;
                    body[label] = v;
                }
                const auto p = methods::parse_distribution(body.dump(), presented);
                if (mode <= 1 || !any_positive) {
                    c.require(p.is_invalid(), "zero/negative vector accepted: " + body.dump());
                } else {
                    double sum = 0.0;
                    for (const auto& [id, v] : p.distribution()->probabilities) {
                        c.require(v >= 0.0, "negative probability");
                        sum += v;
                    }
                    c.near(sum, 1.0, 1e-9, "renormalized sum");
                }
            }
        }
    }
    return c.outcome(std::to_string(accepted) + " enum values accepted, " + std::to_string(rejected) +
                     " out-of-enum strings rejected");
}

Outcome robustness_mechanics() {
    Checks c;
    const metrics::Ratings agree{{"a", "a", "a", "a"}, {"b", "b", "b", "b"}, {"c", "c", "c", "c"}};
    c.near(metrics::fleiss_kappa(agree), 1.0, 1e-12, "full agreement");
    const metrics::Ratings hand{{"a", "a", "b"}, {"b", "b", "a"}};
    c.near(metrics::fleiss_kappa(hand), -1.0 / 3.0, 1e-9, "2-item / 3-rater fixture");

    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t items = 2 + rng() % 20, raters = 2 + rng() % 4;
        metrics::Ratings r(items, std::vector<std::string>(raters));
        for (auto& row : r)
            for (auto& v : row) v = std::string(1, static_cast<char>('a' + rng() % 3));
        const double k = metrics::fleiss_kappa(r);
        auto by_items = r;
        std::shuffle(by_items.begin(), by_items.end(), rng);
        std::vector<std::size_t> order(raters);
        for (std::size_t i = 0; i < raters; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        auto by_raters = r;
        for (std::size_t i = 0; i < items; ++i)
            for (std::size_t j = 0; j < raters; ++j) by_raters[i][j] = r[i][order[j]];
        c.near(metrics::fleiss_kappa(by_items), k, 1e-12, "item permutation");
        c.near(metrics::fleiss_kappa(by_raters), k, 1e-12, "rater permutation");
    }

    // Variant raters through the harness: the echo run agrees on every item.
    testing_support::TempDir dir("accept-kappa");
    auto run = prepare("no_logprobs.yaml", dir.path());
    harness::RecordStore store(run->config.records_dir());
    harness::execute(harness::expand_grid(run->config), run->context, store, {});
    const auto eval = harness::evaluate(run->datasets, store.load_all(), 0.10, 0);
    c.require(!eval.robustness.empty(), "no robustness rows");
    for (const auto& row : eval.robustness) {
        c.require(row.raters.size() == 4, "expected 4 variant raters");
        c.require(row.kappa && *row.kappa == 1.0, "variant kappa not 1 for " + methods::to_string(row.group.method));
    }
    return c.outcome("kappa 1.0 on agreement, -1/3 on the hand fixture, permutation invariant");
}

Outcome grid_idempotence() {
    Checks c;
    testing_support::TempDir a("accept-clean-a"), b("accept-clean-b"), resumed("accept-resumed");

    auto clean_a = prepare("grid128.yaml", a.path());
    const auto grid = harness::expand_grid(clean_a->config);
    std::size_t respondents = 0;
    for (const auto& q : clean_a->config.grid.questions)
        respondents = survey::respondents_for(clean_a->datasets.front(), q).size();
    const std::size_t expected = grid.size() * respondents;

    auto run_clean = [&](Run& run) {
        harness::RecordStore store(run.config.records_dir());
        harness::execute(grid, run.context, store, {});
        harness::write_reports(harness::evaluate(run.datasets, store.load_all(), 0.10, 0), run.config.reports_dir());
    };
    run_clean(*clean_a);
    auto clean_b = prepare("grid128.yaml", b.path());
    run_clean(*clean_b);
    std::size_t compared = 0;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(clean_a->config.reports_dir())) {
        if (!entry.is_regular_file()) continue;
        const auto rel = std::filesystem::relative(entry.path(), clean_a->config.reports_dir());
        c.require(testing_support::slurp(entry.path()) == testing_support::slurp(clean_b->config.reports_dir() / rel),
                  "report differs between clean runs: " + rel.string());
        ++compared;
    }
    c.require(compared >= 3, "too few report files");

    auto part = prepare("grid128.yaml", resumed.path());
    {
        harness::RecordStore store(part->config.records_dir());
        std::stop_source stop;
        std::atomic<std::size_t> seen{0};
        harness::ExecuteOptions options;
        options.max_in_flight = 4;
        options.stop = stop.get_token();
        options.on_record = [&](const methods::RunRecord&) {
            if (++seen == expected / 3) stop.request_stop();
        };
        const auto first = harness::execute(grid, part->context, store, options);
        c.require(first.interrupted && first.completed < expected, "first run was not interrupted");
    }
    harness::RecordStore store(part->config.records_dir());
    harness::execute(grid, part->context, store, {});
    const auto records = store.load_all();
    std::set<std::string> keys;
    for (const auto& r : records) keys.insert(r.key);
    std::size_t lines = 0;
    for (const auto& entry : std::filesystem::directory_iterator(part->config.records_dir())) {
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) lines += !line.empty();
    }
    c.require(records.size() == expected, "record count " + std::to_string(records.size()) + " != " + std::to_string(expected));
    c.require(lines == expected, "shard lines " + std::to_string(lines) + " != " + std::to_string(expected));
    c.require(keys.size() == records.size(), "duplicate keys after resume");
    harness::write_reports(harness::evaluate(part->datasets, records, 0.10, 0), part->config.reports_dir());
    c.require(testing_support::slurp(part->config.reports_dir() / "metrics.csv") ==
                  testing_support::slurp(clean_a->config.reports_dir() / "metrics.csv"),
              "resumed metrics.csv differs from clean run");
    return c.outcome(std::to_string(grid.size()) + " cells x " + std::to_string(respondents) + " respondents = " +
                     std::to_string(expected) + " records, no duplicates; " + std::to_string(compared) +
                     " report files identical");
}

Outcome live_smoke() {
    const char* url = std::getenv("SURVEYSIM_LIVE_URL");
    if (!url || !*url) return {Status::skip, "set SURVEYSIM_LIVE_URL (and SURVEYSIM_LIVE_MODEL) to run"};
    Checks c;
    backend::HttpBackendConfig http;
    http.url = url;
    http.model = std::getenv("SURVEYSIM_LIVE_MODEL") ? std::getenv("SURVEYSIM_LIVE_MODEL") : "";
    http.api_key_env = "SURVEYSIM_API_KEY";
    if (const char* dialect = std::getenv("SURVEYSIM_LIVE_DIALECT")) http.dialect = backend::dialect_by_name(dialect);
    backend::HttpBackend live(http);
    c.require(live.capabilities().supports_json_schema, "endpoint dialect lacks JSON schema support");

    testing_support::TempDir dir("accept-live");
    auto run = prepare("echo.yaml", dir.path());
    const auto& dataset = run->datasets.front();
    const auto& dataset_config = run->config.dataset(dataset.schema.id);
    methods::OpenCache cache;
    methods::MethodEnvironment env;
    env.schema = &dataset.schema;
    env.templates = &dataset_config.templates;
    env.backend = &live;
    env.open_cache = &cache;
    harness::SimulationSpec spec;
    spec.dataset_id = dataset.schema.id;
    spec.question_id = "vote";
    spec.method = methods::MethodId::restricted_choice;
    spec.model_id = http.model;
    std::size_t invalid = 0, n = 0;
    for (const auto* r : survey::respondents_for(dataset, "vote")) {
        if (n == 20) break;
        ++n;
        const auto record = methods::run_method(spec, *r, env);
        invalid += record.prediction.is_invalid();
        c.require(!record.error, "backend error: " + record.error.value_or(""));
    }
    c.require(invalid == 0, std::to_string(invalid) + " of " + std::to_string(n) + " invalid");
    return c.outcome("restricted choice on " + std::to_string(n) + " respondents, invalid_fraction 0");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metric oracles", metric_oracles},
        {"echo end-to-end", echo_end_to_end},
        {"stratified baseline", stratified_baseline},
        {"token aggregation", token_aggregation},
        {"validity and exclusion", validity_and_exclusion},
        {"schema conformance", schema_conformance},
        {"robustness mechanics", robustness_mechanics},
        {"grid idempotence", grid_idempotence},
        {"live smoke test", live_smoke},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = {Status::fail, std::string("exception: ") + e.what()};
        }
        const char* label = outcome.status == Status::pass ? "PASS" : outcome.status == Status::skip ? "SKIP" : "FAIL";
        failures += outcome.status == Status::fail;
        std::printf("criterion %zu %-24s %s  %s\n", i + 1, criteria[i].first.c_str(), label, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
