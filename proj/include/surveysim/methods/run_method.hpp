#pragma once

#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "surveysim/backend/backend.hpp"
#include "surveysim/harness/spec.hpp"
#include "surveysim/methods/prediction.hpp"
#include "surveysim/survey/prompts.hpp"

namespace surveysim::methods {

// Which generation-time features a run actually used.
struct RunFlags {
    bool logprobs_read = false;
    bool format_instructions = false;
    bool vocabulary_restricted = false;
    bool open_output_first = false;
    bool distribution_produced = false;

    bool operator==(const RunFlags&) const = default;
};

// Persisted outcome of one grid cell for one respondent.
struct RunRecord {
    std::string key;
    harness::SimulationSpec spec;
    std::string respondent_id;
    IndividualPrediction prediction;
    std::optional<std::string> open_text;
    backend::FinishReason finish_reason = backend::FinishReason::stop;
    std::optional<std::string> error_kind;
    std::optional<std::string> error;
    bool degraded = false;  // schema unsupported, ran on instructions alone
    RunFlags flags;
    double elapsed_ms = 0.0;

    // "valid", "partial" or "invalid".
    std::string validity() const;

    nlohmann::json to_json() const;
    static RunRecord from_json(const nlohmann::json& doc);
};

struct MaxTokens {
    int token = 16;
    int restricted = 256;
    int reasoning = 1024;
    int open = 1024;
    int classify = 256;
};

struct OpenOutput {
    std::string text;
    std::optional<std::string> reasoning_text;
    backend::FinishReason finish_reason = backend::FinishReason::stop;
    std::optional<std::string> error_kind;
    std::optional<std::string> error;
};

// Step-one output of the open generation methods, shared by both methods of
// a cell. The first request for a key runs the generation; concurrent and
// later requests for the same key wait for and reuse that result.
class OpenCache {
public:
    static std::string key_for(const harness::SimulationSpec& spec, const std::string& respondent_id);

    OpenOutput get_or_generate(const std::string& key, const std::function<OpenOutput()>& generate);
    // Seeds the cache from a persisted record. An existing entry is kept.
    void prime(const std::string& key, OpenOutput output);
    std::size_t generated() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_future<OpenOutput>> entries_;
    std::size_t generated_ = 0;
};

struct MethodEnvironment {
    const survey::DatasetSchema* schema = nullptr;
    const survey::TemplateSet* templates = nullptr;
    backend::Backend* backend = nullptr;
    OpenCache* open_cache = nullptr;
    int logprobs_top_k = 20;
    double classification_temperature = 1.0;  // the model's default temperature
    bool reasoning_enabled = false;
    MaxTokens max_tokens;
};

// Unconstrained open-ended answer to the persona prompt, cached per cell.
OpenOutput open_step(const harness::SimulationSpec& spec, const survey::Respondent& respondent,
                     const MethodEnvironment& env);

enum class ClassifyMode { choice, distribution };

struct Classification {
    IndividualPrediction prediction;
    backend::FinishReason finish_reason = backend::FinishReason::stop;
    bool degraded = false;
};

// Annotator step of the open generation methods, run at the model's default
// temperature. Whitespace-only open text is not sent and yields Invalid.
// Throws BackendError.
Classification classify_open(const std::string& open_text, const harness::SimulationSpec& spec,
                             const survey::Respondent& respondent, const MethodEnvironment& env, ClassifyMode mode);

// Runs one method for one respondent. Backend failures become an Invalid
// prediction with finish_reason=error; a record is always returned.
RunRecord run_method(const harness::SimulationSpec& spec, const survey::Respondent& respondent,
                     const MethodEnvironment& env);

}  // namespace surveysim::methods
