#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "surveysim/backend/backend.hpp"

namespace surveysim::backend {

// Where a given server expects the guided-decoding extensions. Field paths are
// dotted ("structured_outputs.choice"); an empty path means unsupported.
struct ServerDialect {
    std::string name;
    std::string choice_field;
    std::string json_schema_field;
    bool json_schema_as_response_format = false;  // OpenAI "response_format" wrapper
    bool supports_prefill = false;
    nlohmann::json prefill_fields;  // merged into the body when a prefill is sent
    std::string reasoning_toggle_field;
    std::string top_k_field = "top_k";
    std::vector<std::string> reasoning_response_fields{"reasoning_content", "reasoning"};
    std::string reasoning_open = "<think>";
    std::string reasoning_close = "</think>";
};

// Shipped profiles: "vllm", "vllm-structured", "openai", "plain".
ServerDialect dialect_by_name(const std::string& name);

struct HttpBackendConfig {
    std::string url;  // full chat-completions endpoint
    std::string model;
    std::string api_key_env;  // environment variable holding the bearer token
    ServerDialect dialect = dialect_by_name("vllm");
    int max_in_flight = 8;
    int max_logprobs = 20;
    std::chrono::milliseconds timeout{120000};
    int max_attempts = 3;
    std::chrono::milliseconds initial_backoff{500};
};

// Request body for the chat-completions endpoint.
nlohmann::json build_chat_request(const GenerationRequest& request, const HttpBackendConfig& config);

// Parses a chat-completions response body. Throws BackendError on a
// malformed body or when a choice constraint was not honoured.
GenerationResult parse_chat_response(const nlohmann::json& body, const GenerationRequest& request,
                                     const ServerDialect& dialect);

// OpenAI-style chat-completions backend with guided-decoding extensions.
class HttpBackend final : public Backend {
public:
    explicit HttpBackend(HttpBackendConfig config);
    ~HttpBackend() override;

    Capabilities capabilities() const override;
    GenerationResult generate(const GenerationRequest& request) override;

private:
    GenerationResult attempt(const GenerationRequest& request, const std::string& body);

    HttpBackendConfig config_;
    std::string origin_;
    std::string path_;
    std::counting_semaphore<4096> in_flight_;
};

}  // namespace surveysim::backend
