#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "surveysim/backend/mock_backend.hpp"
#include "surveysim/harness/config.hpp"
#include "surveysim/harness/evaluate.hpp"
#include "surveysim/harness/execute.hpp"
#include "surveysim/harness/grid.hpp"
#include "surveysim/harness/store.hpp"
#include "test_support.hpp"

using namespace surveysim;
using namespace surveysim::harness;
using testing_support::fixture;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct Loaded {
    RunConfig config;
    std::vector<survey::Dataset> datasets;
    RunContext context;
};

Loaded load(const std::string& name, const std::filesystem::path& out_dir) {
    Loaded l;
    l.config = load_config(fixture(name));
    l.config.out_dir = out_dir;
    l.datasets = load_datasets(l.config);
    l.context.config = &l.config;
    l.context.datasets = &l.datasets;
    l.context.backends = make_backends(l.config, l.datasets);
    return l;
}

// Minimal config text with one dataset; `extra` is appended verbatim.
std::string config_text(const std::string& grid, const std::string& extra = "") {
    return R"(datasets:
  - id: synth
    path: synth_respondents.csv
    id_column: respondent
    persona: "I live in {state}."
    attributes: [state]
    questions:
      - id: vote
        text: Vote
        truth_column: vote2016
        options: [Clinton, Trump, Non-voter]
backends:
  mock: {kind: mock, script: mock_echo.json}
models:
  - {id: m, backend: mock}
grid:
)" + grid + extra;
}

std::size_t line_count(const std::filesystem::path& dir) {
    std::size_t lines = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        std::ifstream in(entry.path());
        std::string line;
        while (std::getline(in, line)) lines += !line.empty();
    }
    return lines;
}

}  // namespace

TEST(Config, FixturesParse) {
    for (const char* name : {"echo.yaml", "garbage.yaml", "grid128.yaml", "no_logprobs.yaml", "atp.yaml"}) {
        const auto config = load_config(fixture(name));
        EXPECT_FALSE(config.datasets.empty()) << name;
        EXPECT_NO_THROW(load_datasets(config)) << name;
    }
    const auto echo = load_config(fixture("echo.yaml"));
    EXPECT_EQ(echo.model("mock-7b").default_temperature, 0.7);
    EXPECT_EQ(echo.dataset("synth").schema.question("economy").scale_kind, survey::ScaleKind::ordinal);
    EXPECT_EQ(echo.backends.at("live").kind, BackendKind::http);
    EXPECT_THROW(echo.dataset("nope"), ConfigError);
}

TEST(Config, ErrorsAreReported) {
    const auto base = fixture("");
    const std::string ok_grid = "  methods: all\n  variants: all\n";
    EXPECT_NO_THROW(parse_config(config_text(ok_grid), base));
    EXPECT_THROW(parse_config(config_text("  methods: [telepathy]\n"), base), ConfigError);
    EXPECT_THROW(parse_config(config_text("  variants: [sideways]\n"), base), ConfigError);
    EXPECT_THROW(parse_config(config_text("  decoding: {greedy: false}\n"), base), ConfigError);
    EXPECT_THROW(parse_config(config_text("  decoding: {seeds: [-1]}\n"), base), ConfigError);
    EXPECT_THROW(parse_config(config_text("  decoding: {greedy: true, sweep: {temperatures: [0.5], top_k: [5]}}\n"), base),
                 ConfigError);
    EXPECT_THROW(parse_config(config_text("  questions: [missing]\n"), base), ConfigError);
    EXPECT_THROW(parse_config(config_text(ok_grid, "max_in_flight: 0\n"), base), ConfigError);
    EXPECT_THROW(parse_config("datasets: [\n", base), ConfigError);
    EXPECT_THROW(parse_config("- a\n- b\n", base), ConfigError);
    auto bad_backend = config_text(ok_grid);
    bad_backend.replace(bad_backend.find("backend: mock}"), 14, "backend: gone}");
    EXPECT_THROW(parse_config(bad_backend, base), ConfigError);
    EXPECT_THROW(load_config(fixture("absent.yaml")), ConfigError);

    auto config = parse_config(config_text(ok_grid), base);
    EXPECT_THROW(override_backend(config, "nowhere"), ConfigError);
}

TEST(Grid, CountsFollowTheConfig) {
    EXPECT_EQ(expand_grid(load_config(fixture("echo.yaml"))).size(), 64u);
    EXPECT_EQ(expand_grid(load_config(fixture("grid128.yaml"))).size(), 128u);
    EXPECT_EQ(expand_grid(load_config(fixture("atp.yaml"))).size(), 224u);
    EXPECT_EQ(expand_grid(load_config(fixture("no_logprobs.yaml"))).size(), 20u);
}

TEST(Grid, GreedySeedsAndSweepLevels) {
    const auto config = parse_config(
        config_text("  methods: [restricted_choice]\n  variants: [full_text_original]\n"
                    "  decoding: {greedy: true, seeds: [1, 2], sweep: {temperatures: [0.5, 1.5], top_k: [10]}}\n"),
        fixture(""));
    const auto grid = expand_grid(config);
    ASSERT_EQ(grid.size(), 1u + 2u + 2u * 1u * 2u);
    EXPECT_EQ(grid[0].decoding, Decoding::greedy);
    EXPECT_EQ(grid[0].seed, kGreedySeed);
    EXPECT_EQ(grid[1].decoding, Decoding::default_temperature);
    EXPECT_EQ(grid[1].temperature, 1.0);  // the model's default
    EXPECT_EQ(grid[3].decoding, Decoding::sweep);
    EXPECT_EQ(grid[3].top_k, std::optional<int>(10));
    std::set<std::string> keys;
    for (const auto& s : grid) keys.insert(s.key());
    EXPECT_EQ(keys.size(), grid.size());
}

TEST(Grid, ExclusionsMatchEveryListedField) {
    const auto config = parse_config(
        config_text("  methods: all\n  variants: all\n  exclude:\n"
                    "    - {methods: [open], variants: [indexed_reversed]}\n"
                    "    - {methods: [restricted_choice]}\n"),
        fixture(""));
    const auto grid = expand_grid(config);
    EXPECT_EQ(grid.size(), 32u - 2u - 4u + 0u);  // open x indexed_reversed, restricted_choice x all variants
    for (const auto& s : grid) {
        EXPECT_NE(s.method, methods::MethodId::restricted_choice);
        EXPECT_FALSE(methods::is_open_method(s.method) && s.variant.name() == "indexed_reversed");
    }
}

TEST(Spec, KeysAreStableAndSensitiveToEveryField) {
    SimulationSpec base;
    base.dataset_id = "synth";
    base.question_id = "vote";
    base.model_id = "m";
    EXPECT_EQ(base.key(), SimulationSpec(base).key());
    EXPECT_EQ(SimulationSpec::from_json(base.to_json()), base);
    std::vector<SimulationSpec> variants(9, base);
    variants[0].dataset_id = "other";
    variants[1].question_id = "economy";
    variants[2].method = methods::MethodId::answer_prefix;
    variants[3].model_id = "m2";
    variants[4].variant = {survey::Labeling::indexed, survey::Order::original};
    variants[5].decoding = Decoding::default_temperature;
    variants[6].seed = 3;
    variants[7].temperature = 0.5;
    variants[8].top_k = 5;
    std::set<std::string> keys{base.key()};
    for (const auto& v : variants) {
        keys.insert(v.key());
        EXPECT_EQ(SimulationSpec::from_json(v.to_json()), v);
    }
    EXPECT_EQ(keys.size(), 10u);
    EXPECT_NE(base.record_key("r1"), base.record_key("r2"));
    EXPECT_EQ(stable_hash("abc"), "e71fa2190541574b");  // FNV-1a 64 reference value
}

TEST(Store, AppendContainsLoadAndDeduplicate) {
    TempDir dir("store");
    methods::RunRecord a, b;
    a.spec.dataset_id = b.spec.dataset_id = "synth";
    a.spec.model_id = b.spec.model_id = "m";
    a.respondent_id = "r1";
    b.respondent_id = "r2";
    a.key = a.spec.record_key("r1");
    b.key = b.spec.record_key("r2");
    a.prediction.value = methods::Choice{"trump"};
    b.prediction = methods::make_invalid("zz");
    {
        RecordStore store(dir.path());
        store.append(a);
        store.append(b);
        store.append(a);  // ignored
        EXPECT_EQ(store.size(), 2u);
        EXPECT_TRUE(store.contains(a.key));
    }
    EXPECT_EQ(line_count(dir.path()), 2u);
    EXPECT_TRUE(std::filesystem::exists(dir.path() / RecordStore::shard_name("synth", "m")));

    // A duplicate written behind the store's back is dropped on load.
    {
        std::ofstream out(dir.path() / RecordStore::shard_name("synth", "m"), std::ios::app);
        auto copy = a;
        copy.prediction.value = methods::Choice{"clinton"};
        out << copy.to_json().dump() << "\n";
    }
    RecordStore reopened(dir.path());
    const auto all = reopened.load_all();
    ASSERT_EQ(all.size(), 2u);
    for (const auto& r : all)
        if (r.key == a.key) EXPECT_EQ(r.prediction.choice()->option_id, "trump");
}

TEST(Store, TornTrailingLineIsDropped) {
    TempDir dir("torn");
    methods::RunRecord a;
    a.spec.dataset_id = "synth";
    a.spec.model_id = "m";
    a.respondent_id = "r1";
    a.key = a.spec.record_key("r1");
    a.prediction.value = methods::Choice{"trump"};
    {
        RecordStore store(dir.path());
        store.append(a);
    }
    const auto shard = dir.path() / RecordStore::shard_name("synth", "m");
    {
        std::ofstream out(shard, std::ios::app);
        out << R"({"key":"deadbeef","spec":{"data)";
    }
    RecordStore store(dir.path());
    EXPECT_EQ(store.size(), 1u);
    auto b = a;
    b.respondent_id = "r2";
    b.key = b.spec.record_key("r2");
    store.append(b);
    EXPECT_EQ(store.load_all().size(), 2u);
    std::ifstream in(shard);
    std::string line;
    while (std::getline(in, line)) EXPECT_NO_THROW(nlohmann::json::parse(line)) << line;
}

TEST(Execute, EchoRunScoresPerfectly) {
    TempDir dir("echo");
    auto l = load("echo.yaml", dir.path());
    const auto grid = expand_grid(l.config);
    RecordStore store(l.config.records_dir());
    const auto summary = execute(grid, l.context, store, {});
    EXPECT_EQ(summary.cells, 64u);
    EXPECT_EQ(summary.tasks, 64u * 50u);
    EXPECT_EQ(summary.completed, summary.tasks);
    EXPECT_EQ(summary.failed, 0u);
    EXPECT_EQ(summary.open_generations, 2u * 4u * 50u);

    auto mock = std::dynamic_pointer_cast<backend::MockBackend>(l.context.backends.at("mock"));
    ASSERT_TRUE(mock);
    EXPECT_EQ(mock->call_count("open"), 400u);
    EXPECT_EQ(mock->call_count("classify"), 800u);

    const auto eval = evaluate(l.datasets, store.load_all(), 0.10, 0);
    ASSERT_EQ(eval.specs.size(), 64u);
    for (const auto& row : eval.specs) {
        EXPECT_DOUBLE_EQ(row.metrics.macro_f1, 1.0) << row.spec.canonical();
        EXPECT_DOUBLE_EQ(row.metrics.invalid_fraction, 0.0);
        EXPECT_NEAR(*row.metrics.mean_distance, 0.0, 1e-12);
        EXPECT_NEAR(*row.metrics.brier, 0.0, 1e-12);
        EXPECT_FALSE(row.metrics.gated);
    }
    EXPECT_EQ(eval.baselines.size(), 2u);
    EXPECT_EQ(eval.robustness.size(), 16u);  // 2 questions x 8 methods, variants as raters
    for (const auto& r : eval.robustness) {
        EXPECT_EQ(r.raters.size(), 4u);
        EXPECT_DOUBLE_EQ(*r.kappa, 1.0);
    }
}

TEST(Execute, GarbageRunIsGatedEverywhere) {
    TempDir dir("garbage");
    auto l = load("garbage.yaml", dir.path());
    RecordStore store(l.config.records_dir());
    const auto summary = execute(expand_grid(l.config), l.context, store, {});
    EXPECT_EQ(summary.failed, 0u);
    const auto eval = evaluate(l.datasets, store.load_all(), 0.10, 0);
    for (const auto& row : eval.specs) {
        EXPECT_DOUBLE_EQ(row.metrics.invalid_fraction, 1.0);
        EXPECT_TRUE(row.metrics.gated);
        EXPECT_FALSE(row.metrics.mean_distance);
    }
    for (const auto& r : eval.robustness) EXPECT_FALSE(r.kappa);
    std::istringstream csv(metrics_csv(eval));
    std::string line;
    while (std::getline(csv, line))
        if (line.find("stratified_baseline") == std::string::npos) EXPECT_EQ(line.find(",mean_tv,"), std::string::npos);
}

TEST(Execute, InterruptedRunResumesWithoutDuplicates) {
    TempDir full_dir("full"), resumed_dir("resumed");

    auto full = load("grid128.yaml", full_dir.path());
    const auto grid = expand_grid(full.config);
    RecordStore full_store(full.config.records_dir());
    execute(grid, full.context, full_store, {});
    write_reports(evaluate(full.datasets, full_store.load_all(), 0.10, 0), full.config.reports_dir());

    auto part = load("grid128.yaml", resumed_dir.path());
    std::size_t expected_total = 0;
    {
        RecordStore store(part.config.records_dir());
        std::stop_source stop;
        std::atomic<std::size_t> seen{0};
        ExecuteOptions options;
        options.max_in_flight = 4;
        options.stop = stop.get_token();
        options.on_record = [&](const methods::RunRecord&) {
            if (++seen == 500) stop.request_stop();
        };
        const auto first = execute(grid, part.context, store, options);
        EXPECT_TRUE(first.interrupted);
        EXPECT_GE(first.completed, 500u);
        EXPECT_LT(first.completed, first.tasks);
        expected_total = first.tasks;
    }
    {
        // Simulate a crash mid-write on top of the interruption.
        std::ofstream out(part.config.records_dir() / RecordStore::shard_name("synth", "mock-7b"), std::ios::app);
        out << R"({"key":"torn)";
    }
    RecordStore store(part.config.records_dir());
    const auto before = store.size();
    const auto second = execute(grid, part.context, store, {});
    EXPECT_FALSE(second.interrupted);
    EXPECT_EQ(second.skipped, before);
    EXPECT_EQ(second.completed + before, expected_total);
    EXPECT_EQ(line_count(part.config.records_dir()), expected_total);

    const auto records = store.load_all();
    std::set<std::string> keys;
    for (const auto& r : records) keys.insert(r.key);
    EXPECT_EQ(keys.size(), records.size());

    write_reports(evaluate(part.datasets, records, 0.10, 0), part.config.reports_dir());
    for (const char* name : {"metrics.csv", "summary.md", "plotdata/macro_f1.csv", "plotdata/fleiss_kappa.csv"})
        EXPECT_EQ(slurp(full.config.reports_dir() / name), slurp(part.config.reports_dir() / name)) << name;

    // A third run has nothing to do.
    const auto third = execute(grid, part.context, store, {});
    EXPECT_EQ(third.completed, 0u);
    EXPECT_EQ(third.skipped, expected_total);
}

TEST(Execute, BackendErrorsAreRecordedPerRespondent) {
    TempDir dir("failing");
    auto l = load("echo.yaml", dir.path());
    backend::MockScript script;
    script.rules.push_back({{{"r01", "r02"}}, {backend::MockBehaviorKind::fail}});
    script.fallback = backend::MockBehavior{};
    backend::TruthTable truths;
    for (const auto& r : l.datasets[0].respondents)
        for (const auto& [q, t] : r.ground_truth) truths[{q, r.id}] = t;
    l.context.backends["mock"] = std::make_shared<backend::MockBackend>(script, truths);
    auto grid = expand_grid(l.config);
    grid.resize(4);
    RecordStore store(l.config.records_dir());
    const auto summary = execute(grid, l.context, store, {});
    EXPECT_EQ(summary.failed, 8u);
    EXPECT_EQ(summary.completed, 200u);
    const auto eval = evaluate(l.datasets, store.load_all(), 0.10, 0);
    for (const auto& row : eval.specs) EXPECT_DOUBLE_EQ(row.metrics.invalid_fraction, 2.0 / 50.0);
}

TEST(Evaluate, RejectsRecordsItCannotPlace) {
    TempDir dir("reject");
    auto l = load("echo.yaml", dir.path());
    methods::RunRecord r;
    r.spec.dataset_id = "synth";
    r.spec.question_id = "vote";
    r.spec.model_id = "mock-7b";
    r.respondent_id = "r01";
    r.key = r.spec.record_key(r.respondent_id);
    r.prediction.value = methods::Choice{"trump"};
    EXPECT_NO_THROW(evaluate(l.datasets, {r}, 0.10, 0));
    auto unknown_q = r;
    unknown_q.spec.question_id = "weather";
    EXPECT_THROW(evaluate(l.datasets, {unknown_q}, 0.10, 0), EvaluationError);
    auto unknown_ds = r;
    unknown_ds.spec.dataset_id = "elsewhere";
    EXPECT_THROW(evaluate(l.datasets, {unknown_ds}, 0.10, 0), EvaluationError);
    auto no_truth = r;
    no_truth.respondent_id = "r99";
    EXPECT_THROW(evaluate(l.datasets, {no_truth}, 0.10, 0), EvaluationError);
}

TEST(Evaluate, MixedInvalidsAroundTheThreshold) {
    TempDir dir("mixed");
    auto l = load("echo.yaml", dir.path());
    auto grid = expand_grid(l.config);
    grid.resize(1);
    RecordStore store(l.config.records_dir());
    execute(grid, l.context, store, {});
    auto records = store.load_all();
    // 50 respondents: 5 invalid is exactly 10%, 6 is 12%.
    for (int invalid : {5, 6}) {
        auto copy = records;
        for (int i = 0; i < invalid; ++i) copy[i].prediction = methods::make_invalid("x");
        const auto eval = evaluate(l.datasets, copy, 0.10, 0);
        EXPECT_EQ(eval.specs[0].metrics.gated, invalid == 6);
    }
}

TEST(Reports, FilesAreWrittenAndDeterministic) {
    TempDir dir("reports");
    auto l = load("no_logprobs.yaml", dir.path());
    RecordStore store(l.config.records_dir());
    execute(expand_grid(l.config), l.context, store, {});
    const auto eval = evaluate(l.datasets, store.load_all(), 0.10, 0);
    write_reports(eval, dir.path() / "a");
    write_reports(eval, dir.path() / "b");
    for (const char* name : {"metrics.csv", "summary.md", "plotdata/subpopulation_distance.csv", "plotdata/brier.csv"}) {
        ASSERT_TRUE(std::filesystem::exists(dir.path() / "a" / name)) << name;
        EXPECT_EQ(slurp(dir.path() / "a" / name), slurp(dir.path() / "b" / name));
    }
    const auto csv = slurp(dir.path() / "a" / "metrics.csv");
    EXPECT_EQ(csv.rfind("dataset,question,model,method,variant,decoding,seed,temperature,top_k,metric,subpopulation,value\n", 0),
              0u);
    EXPECT_NE(csv.find("stratified_baseline"), std::string::npos);
    EXPECT_NE(csv.find("fleiss_kappa_variant"), std::string::npos);
}
