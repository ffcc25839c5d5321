#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveysim/backend/backend.hpp"
#include "surveysim/backend/http_backend.hpp"
#include "surveysim/methods/run_method.hpp"
#include "surveysim/survey/prompts.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::harness {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    survey::DatasetSchema schema;
    std::filesystem::path path;
    survey::TemplateSet templates;
};

enum class BackendKind { mock, http };

struct BackendProfile {
    std::string name;
    BackendKind kind = BackendKind::mock;
    std::filesystem::path mock_script;
    backend::HttpBackendConfig http;
};

struct ModelConfig {
    std::string id;
    std::string backend;  // profile name
    double default_temperature = 1.0;
    bool reasoning = false;
};

// A cell is excluded when every non-empty list contains its value. Method
// lists also accept the family names "token", "restricted" and "open".
struct Exclusion {
    std::vector<std::string> datasets;
    std::vector<std::string> questions;
    std::vector<std::string> models;
    std::vector<std::string> methods;
    std::vector<std::string> variants;
    std::vector<std::string> decodings;
};

struct SweepConfig {
    std::vector<double> temperatures;
    std::vector<int> top_k;
};

struct GridConfig {
    std::vector<methods::MethodId> methods;
    std::vector<survey::ScaleVariant> variants;
    std::vector<std::string> questions;  // empty means every question of every dataset
    bool greedy = true;
    std::vector<std::int64_t> seeds;  // default-temperature cells, one per seed
    std::optional<SweepConfig> sweep;  // temperature x top-k cells, one per seed
    std::vector<Exclusion> exclusions;
};

struct RunConfig {
    std::filesystem::path source;  // the config file; relative paths resolve against its directory
    std::vector<DatasetConfig> datasets;
    std::map<std::string, BackendProfile> backends;
    std::vector<ModelConfig> models;
    GridConfig grid;
    std::filesystem::path out_dir = "out";
    int max_in_flight = 8;
    int logprobs_top_k = 20;
    methods::MaxTokens max_tokens;
    std::uint64_t baseline_seed = 0;
    double threshold = 0.10;

    const DatasetConfig& dataset(const std::string& id) const;
    const ModelConfig& model(const std::string& id) const;
    std::filesystem::path records_dir() const { return out_dir / "records"; }
    std::filesystem::path reports_dir() const { return out_dir / "reports"; }
};

RunConfig parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Points every model at one backend profile.
void override_backend(RunConfig& config, const std::string& profile);

// Loads every dataset of the config in declaration order.
std::vector<survey::Dataset> load_datasets(const RunConfig& config);

// Constructs the backend of each profile in use. Mock backends answer with the
// ground truth of the given datasets when scripted to echo.
std::map<std::string, std::shared_ptr<backend::Backend>> make_backends(const RunConfig& config,
                                                                        const std::vector<survey::Dataset>& datasets);

}  // namespace surveysim::harness
