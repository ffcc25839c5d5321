#include "surveysim/backend/types.hpp"

#include <set>

namespace surveysim::backend {

std::string GenerationConstraint::kind_name() const {
    if (choice_set()) return "choice_set";
    if (json_schema()) return "json_schema";
    return "unconstrained";
}

void GenerationConstraint::validate() const {
    if (const auto* choices = choice_set()) {
        if (choices->choices.empty())
            throw BackendError(ErrorKind::capability_unsupported, "empty choice set");
        std::set<std::string> unique(choices->choices.begin(), choices->choices.end());
        if (unique.size() != choices->choices.size())
            throw BackendError(ErrorKind::capability_unsupported, "duplicate entries in choice set");
    }
    if (const auto* schema = json_schema()) {
        if (!schema->schema.is_object())
            throw BackendError(ErrorKind::capability_unsupported, "json schema must be an object");
    }
}

std::string to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::transport: return "transport";
        case ErrorKind::capability_unsupported: return "capability_unsupported";
        case ErrorKind::constraint_rejected: return "constraint_rejected";
        case ErrorKind::timeout: return "timeout";
        case ErrorKind::unmatched: return "unmatched";
    }
    return "unknown";
}

std::string to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::error: return "error";
    }
    return "error";
}

FinishReason parse_finish_reason(const std::string& text) {
    if (text == "length") return FinishReason::length;
    if (text == "error") return FinishReason::error;
    return FinishReason::stop;
}

void check_request(const GenerationRequest& request, const Capabilities& caps) {
    request.constraint.validate();
    if (request.constraint.choice_set() && !caps.supports_choice_set)
        throw BackendError(ErrorKind::capability_unsupported, "backend does not support choice constraints");
    if (request.constraint.json_schema() && !caps.supports_json_schema)
        throw BackendError(ErrorKind::capability_unsupported, "backend does not support json schema constraints");
    if (request.assistant_prefill) {
        if (!caps.supports_prefill)
            throw BackendError(ErrorKind::capability_unsupported, "backend does not support assistant prefill");
        if (!request.logprobs_top_k)
            throw BackendError(ErrorKind::capability_unsupported, "assistant prefill requires logprobs");
    }
    if (request.logprobs_top_k) {
        if (*request.logprobs_top_k <= 0)
            throw BackendError(ErrorKind::capability_unsupported, "logprobs_top_k must be positive");
        if (*request.logprobs_top_k > caps.max_logprobs)
            throw BackendError(ErrorKind::capability_unsupported,
                               "logprobs_top_k " + std::to_string(*request.logprobs_top_k) +
                                   " exceeds backend limit " + std::to_string(caps.max_logprobs));
    }
    if (request.sampling.max_tokens <= 0)
        throw BackendError(ErrorKind::capability_unsupported, "max_tokens must be positive");
    if (request.sampling.mode == DecodingMode::sampled && request.sampling.temperature < 0)
        throw BackendError(ErrorKind::capability_unsupported, "negative temperature");
}

std::pair<std::optional<std::string>, std::string> split_reasoning(const std::string& text,
                                                                   const std::string& open_marker,
                                                                   const std::string& close_marker) {
    auto strip_leading = [](std::string s) {
        const auto first = s.find_first_not_of(" \t\r\n");
        return first == std::string::npos ? std::string{} : s.substr(first);
    };
    std::size_t body_start = 0;
    const auto lead = text.find_first_not_of(" \t\r\n");
    const bool opened = !open_marker.empty() && lead != std::string::npos &&
                        text.compare(lead, open_marker.size(), open_marker) == 0;
    if (opened) body_start = lead + open_marker.size();
    const auto close = close_marker.empty() ? std::string::npos : text.find(close_marker, body_start);
    if (close == std::string::npos) {
        if (opened) return {text.substr(body_start), std::string{}};
        return {std::nullopt, text};
    }
    return {text.substr(body_start, close - body_start), strip_leading(text.substr(close + close_marker.size()))};
}

}  // namespace surveysim::backend
