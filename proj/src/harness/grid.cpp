#include "surveysim/harness/grid.hpp"

#include <algorithm>

namespace surveysim::harness {

namespace {

bool listed(const std::vector<std::string>& values, const std::string& value) {
    return values.empty() || std::find(values.begin(), values.end(), value) != values.end();
}

bool method_listed(const std::vector<std::string>& values, methods::MethodId method) {
    if (values.empty()) return true;
    for (const auto& v : values) {
        if (v == methods::to_string(method)) return true;
        if (v == "token" && methods::is_token_method(method)) return true;
        if (v == "open" && methods::is_open_method(method)) return true;
        if (v == "restricted" && !methods::is_token_method(method) && !methods::is_open_method(method)) return true;
    }
    return false;
}

struct DecodingLevel {
    Decoding decoding;
    std::int64_t seed;
    std::optional<double> temperature;  // unset: the model default
    std::optional<int> top_k;
};

std::vector<DecodingLevel> decoding_levels(const GridConfig& grid) {
    std::vector<DecodingLevel> levels;
    if (grid.greedy) levels.push_back({Decoding::greedy, kGreedySeed, 0.0, std::nullopt});
    for (auto seed : grid.seeds) levels.push_back({Decoding::default_temperature, seed, std::nullopt, std::nullopt});
    if (grid.sweep)
        for (double t : grid.sweep->temperatures)
            for (int k : grid.sweep->top_k)
                for (auto seed : grid.seeds) levels.push_back({Decoding::sweep, seed, t, k});
    return levels;
}

}  // namespace

bool excluded_by(const Exclusion& e, const SimulationSpec& spec) {
    return listed(e.datasets, spec.dataset_id) && listed(e.questions, spec.question_id) &&
           listed(e.models, spec.model_id) && method_listed(e.methods, spec.method) &&
           listed(e.variants, spec.variant.name()) && listed(e.decodings, to_string(spec.decoding));
}

std::vector<SimulationSpec> expand_grid(const RunConfig& config) {
    const auto& grid = config.grid;
    const auto levels = decoding_levels(grid);
    std::vector<SimulationSpec> cells;
    for (const auto& dataset : config.datasets) {
        for (const auto& question : dataset.schema.questions) {
            if (!grid.questions.empty() &&
                std::find(grid.questions.begin(), grid.questions.end(), question.id) == grid.questions.end())
                continue;
            for (const auto& model : config.models) {
                for (auto method : grid.methods) {
                    for (const auto& variant : grid.variants) {
                        for (const auto& level : levels) {
                            SimulationSpec spec;
                            spec.dataset_id = dataset.schema.id;
                            spec.question_id = question.id;
                            spec.model_id = model.id;
                            spec.method = method;
                            spec.variant = variant;
                            spec.decoding = level.decoding;
                            spec.seed = level.seed;
                            spec.temperature = level.temperature.value_or(model.default_temperature);
                            spec.top_k = level.top_k;
                            const bool skip = std::any_of(grid.exclusions.begin(), grid.exclusions.end(),
                                                          [&](const Exclusion& e) { return excluded_by(e, spec); });
                            if (!skip) cells.push_back(std::move(spec));
                        }
                    }
                }
            }
        }
    }
    return cells;
}

}  // namespace surveysim::harness
