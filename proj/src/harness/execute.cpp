#include "surveysim/harness/execute.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "surveysim/survey/dataset.hpp"

namespace surveysim::harness {

namespace {

struct Task {
    const SimulationSpec* spec;
    const survey::Respondent* respondent;
    const survey::Dataset* dataset;
};

const survey::Dataset& find_dataset(const std::vector<survey::Dataset>& datasets, const std::string& id) {
    for (const auto& d : datasets)
        if (d.schema.id == id) return d;
    throw ConfigError("dataset '" + id + "' is not loaded");
}

bool open_step_succeeded(const methods::RunRecord& record) {
    return record.open_text && !(record.error && record.error->starts_with("open step"));
}

}  // namespace

RunSummary execute(const std::vector<SimulationSpec>& grid, const RunContext& context, RecordStore& store,
                   const ExecuteOptions& options) {
    const auto& config = *context.config;
    RunSummary summary;
    summary.cells = grid.size();

    methods::OpenCache open_cache;
    for (const auto& record : store.load_all()) {
        if (!methods::is_open_method(record.spec.method) || !open_step_succeeded(record)) continue;
        open_cache.prime(methods::OpenCache::key_for(record.spec, record.respondent_id),
                         methods::OpenOutput{*record.open_text, record.prediction.reasoning_text,
                                             backend::FinishReason::stop, std::nullopt, std::nullopt});
    }

    std::vector<Task> tasks;
    for (const auto& spec : grid) {
        const auto& dataset = find_dataset(*context.datasets, spec.dataset_id);
        for (const auto* respondent : survey::respondents_for(dataset, spec.question_id)) {
            ++summary.tasks;
            if (store.contains(spec.record_key(respondent->id))) {
                ++summary.skipped;
                continue;
            }
            tasks.push_back({&spec, respondent, &dataset});
        }
    }

    std::map<std::string, methods::MethodEnvironment> environments;  // by dataset + model
    auto environment_for = [&](const SimulationSpec& spec) {
        const auto& model = config.model(spec.model_id);
        methods::MethodEnvironment env;
        env.schema = &find_dataset(*context.datasets, spec.dataset_id).schema;
        env.templates = &config.dataset(spec.dataset_id).templates;
        auto backend = context.backends.find(model.backend);
        if (backend == context.backends.end()) throw ConfigError("no backend built for profile '" + model.backend + "'");
        env.backend = backend->second.get();
        env.open_cache = &open_cache;
        env.logprobs_top_k = config.logprobs_top_k;
        env.classification_temperature = model.default_temperature;
        env.reasoning_enabled = model.reasoning;
        env.max_tokens = config.max_tokens;
        return env;
    };
    for (const auto& task : tasks) {
        const auto key = task.spec->dataset_id + "\n" + task.spec->model_id;
        if (!environments.contains(key)) environments.emplace(key, environment_for(*task.spec));
    }

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> completed{0};
    std::atomic<std::size_t> failed{0};
    std::atomic<bool> abort{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::mutex callback_mutex;

    auto worker = [&] {
        while (!abort.load() && !options.stop.stop_requested()) {
            const std::size_t index = next.fetch_add(1);
            if (index >= tasks.size()) return;
            const auto& task = tasks[index];
            try {
                const auto& env = environments.at(task.spec->dataset_id + "\n" + task.spec->model_id);
                auto record = methods::run_method(*task.spec, *task.respondent, env);
                store.append(record);
                ++completed;
                if (record.finish_reason == backend::FinishReason::error) ++failed;
                if (options.on_record) {
                    std::lock_guard lock(callback_mutex);
                    options.on_record(record);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                abort = true;
            }
        }
    };

    const auto threads = static_cast<std::size_t>(std::max(1, options.max_in_flight));
    {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < std::min(threads, std::max<std::size_t>(tasks.size(), 1)); ++i)
            pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    summary.completed = completed.load();
    summary.failed = failed.load();
    summary.open_generations = open_cache.generated();
    summary.interrupted = summary.completed + summary.skipped < summary.tasks;
    return summary;
}

}  // namespace surveysim::harness
