#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace surveysim::backend {

enum class DecodingMode { greedy, sampled };

struct SamplingParams {
    DecodingMode mode = DecodingMode::greedy;
    double temperature = 0.0;  // ignored when greedy
    std::int64_t seed = 0;
    std::optional<int> top_k;
    int max_tokens = 256;

    double effective_temperature() const { return mode == DecodingMode::greedy ? 0.0 : temperature; }
};

struct Unconstrained {};
struct ChoiceSet {
    std::vector<std::string> choices;
};
struct JsonSchema {
    nlohmann::ordered_json schema;
};

struct GenerationConstraint {
    std::variant<Unconstrained, ChoiceSet, JsonSchema> variant;

    bool is_unconstrained() const { return std::holds_alternative<Unconstrained>(variant); }
    const ChoiceSet* choice_set() const { return std::get_if<ChoiceSet>(&variant); }
    const JsonSchema* json_schema() const { return std::get_if<JsonSchema>(&variant); }
    std::string kind_name() const;
    // Throws BackendError(capability_unsupported) on an empty or duplicated choice set.
    void validate() const;
};

// Bookkeeping carried alongside a request. Remote servers never see it; the
// mock uses it to script per-respondent behaviour.
struct RequestContext {
    std::string respondent_id;
    std::string question_id;
    std::string method;
    std::string step;  // "main", "open", "classify"
    // (option id, presentation label) in presentation order.
    std::vector<std::pair<std::string, std::string>> answer_labels;
};

struct GenerationRequest {
    std::string system_text;
    std::string user_text;
    std::optional<std::string> assistant_prefill;
    GenerationConstraint constraint;
    SamplingParams sampling;
    std::optional<int> logprobs_top_k;
    bool reasoning_enabled = false;
    RequestContext context;
};

struct TokenLogprob {
    std::string token_text;
    double logprob = 0.0;
};

enum class FinishReason { stop, length, error };

struct GenerationResult {
    std::string text;
    std::optional<std::string> reasoning_text;
    std::optional<std::vector<TokenLogprob>> first_content_token_logprobs;
    FinishReason finish_reason = FinishReason::stop;
};

struct Capabilities {
    bool supports_choice_set = false;
    bool supports_json_schema = false;
    bool supports_prefill = false;
    int max_logprobs = 0;
    bool supports_reasoning_toggle = false;
};

enum class ErrorKind { transport, capability_unsupported, constraint_rejected, timeout, unmatched };

class BackendError : public std::runtime_error {
public:
    BackendError(ErrorKind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    bool retryable() const noexcept { return kind_ == ErrorKind::transport || kind_ == ErrorKind::timeout; }

private:
    ErrorKind kind_;
};

std::string to_string(ErrorKind kind);
std::string to_string(FinishReason reason);
FinishReason parse_finish_reason(const std::string& text);

// Throws BackendError(capability_unsupported) when `caps` cannot serve the
// request, or when request invariants are violated.
void check_request(const GenerationRequest& request, const Capabilities& caps);

// Splits reasoning from content using an open/close marker pair, scanning once
// left to right. The open marker is optional (some chat templates emit it in
// the prompt); an unclosed open marker makes the whole text reasoning. Leading
// whitespace of the content is dropped.
std::pair<std::optional<std::string>, std::string> split_reasoning(const std::string& text,
                                                                   const std::string& open_marker,
                                                                   const std::string& close_marker);

}  // namespace surveysim::backend
