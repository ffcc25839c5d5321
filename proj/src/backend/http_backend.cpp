#include "surveysim/backend/http_backend.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace surveysim::backend {

namespace {

using json = nlohmann::json;

void set_path(json& body, const std::string& dotted, json value) {
    json* node = &body;
    std::size_t start = 0;
    for (;;) {
        auto dot = dotted.find('.', start);
        auto key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) {
            (*node)[key] = std::move(value);
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

bool whitespace_only(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::vector<TokenLogprob> top_entries(const json& position) {
    std::vector<TokenLogprob> out;
    auto push = [&](const json& entry) {
        out.push_back({entry.value("token", ""), std::min(0.0, entry.value("logprob", -1e9))});
    };
    if (auto it = position.find("top_logprobs"); it != position.end() && it->is_array() && !it->empty()) {
        for (const auto& entry : *it) push(entry);
    } else {
        push(position);
    }
    // Servers occasionally repeat a surface string; keep the first (highest) one.
    std::vector<TokenLogprob> unique;
    for (auto& t : out) {
        if (std::none_of(unique.begin(), unique.end(), [&](const TokenLogprob& u) { return u.token_text == t.token_text; }))
            unique.push_back(std::move(t));
    }
    return unique;
}

}  // namespace

ServerDialect dialect_by_name(const std::string& name) {
    ServerDialect d;
    d.name = name;
    if (name == "vllm") {
        d.choice_field = "guided_choice";
        d.json_schema_field = "guided_json";
        d.supports_prefill = true;
        d.prefill_fields = {{"continue_final_message", true}, {"add_generation_prompt", false}};
        d.reasoning_toggle_field = "chat_template_kwargs.enable_thinking";
    } else if (name == "vllm-structured") {
        d.choice_field = "structured_outputs.choice";
        d.json_schema_field = "structured_outputs.json";
        d.supports_prefill = true;
        d.prefill_fields = {{"continue_final_message", true}, {"add_generation_prompt", false}};
        d.reasoning_toggle_field = "chat_template_kwargs.enable_thinking";
    } else if (name == "openai") {
        d.json_schema_as_response_format = true;
        d.top_k_field.clear();
    } else if (name == "plain") {
        d.top_k_field.clear();
    } else {
        throw std::invalid_argument("unknown server dialect '" + name + "'");
    }
    return d;
}

json build_chat_request(const GenerationRequest& request, const HttpBackendConfig& config) {
    const auto& dialect = config.dialect;
    json messages = json::array();
    messages.push_back({{"role", "system"}, {"content", request.system_text}});
    messages.push_back({{"role", "user"}, {"content", request.user_text}});
    if (request.assistant_prefill) messages.push_back({{"role", "assistant"}, {"content", *request.assistant_prefill}});

    json body = {{"model", config.model}, {"messages", messages}, {"max_tokens", request.sampling.max_tokens}};
    body["temperature"] = request.sampling.effective_temperature();
    if (request.sampling.mode == DecodingMode::sampled) body["seed"] = request.sampling.seed;
    if (request.sampling.top_k && !dialect.top_k_field.empty()) set_path(body, dialect.top_k_field, *request.sampling.top_k);
    if (request.logprobs_top_k) {
        body["logprobs"] = true;
        body["top_logprobs"] = *request.logprobs_top_k;
    }
    if (const auto* choices = request.constraint.choice_set()) set_path(body, dialect.choice_field, choices->choices);
    if (const auto* schema = request.constraint.json_schema()) {
        json schema_doc = json::parse(schema->schema.dump());
        if (dialect.json_schema_as_response_format)
            body["response_format"] = {{"type", "json_schema"},
                                       {"json_schema", {{"name", "survey_answer"}, {"schema", schema_doc}, {"strict", true}}}};
        else
            set_path(body, dialect.json_schema_field, schema_doc);
    }
    if (request.assistant_prefill) body.merge_patch(dialect.prefill_fields);
    if (!dialect.reasoning_toggle_field.empty()) set_path(body, dialect.reasoning_toggle_field, request.reasoning_enabled);
    return body;
}

GenerationResult parse_chat_response(const json& body, const GenerationRequest& request, const ServerDialect& dialect) {
    if (!body.is_object() || !body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
        throw BackendError(ErrorKind::transport, "malformed chat-completions response: no choices");
    const auto& choice = body["choices"][0];
    const auto message = choice.value("message", json::object());
    const std::string raw = message.contains("content") && message["content"].is_string()
                                ? message["content"].get<std::string>()
                                : std::string{};

    GenerationResult result;
    for (const auto& field : dialect.reasoning_response_fields) {
        if (message.contains(field) && message[field].is_string()) {
            result.reasoning_text = message[field].get<std::string>();
            break;
        }
    }
    std::string content = raw;
    bool inline_reasoning = false;
    if (!result.reasoning_text) {
        auto [reasoning, rest] = split_reasoning(raw, dialect.reasoning_open, dialect.reasoning_close);
        if (reasoning) {
            inline_reasoning = true;
            result.reasoning_text = std::move(reasoning);
            content = std::move(rest);
        }
    }
    if (!request.reasoning_enabled) result.reasoning_text.reset();
    const std::string prefill = request.assistant_prefill.value_or("");
    const bool prefill_echoed = !prefill.empty() && content.rfind(prefill, 0) == 0;
    if (prefill_echoed) content.erase(0, prefill.size());
    result.text = content;
    result.finish_reason = parse_finish_reason(choice.value("finish_reason", "stop"));

    if (request.logprobs_top_k) {
        const auto logprobs = choice.value("logprobs", json::object());
        const auto positions = logprobs.is_object() ? logprobs.value("content", json::array()) : json::array();
        std::size_t index = 0;
        std::size_t consumed = 0;
        std::size_t skip_until = 0;
        if (inline_reasoning) {
            std::string joined;
            for (const auto& p : positions) joined += p.value("token", "");
            auto close = joined.find(dialect.reasoning_close);
            if (close != std::string::npos) skip_until = close + dialect.reasoning_close.size();
        }
        if (prefill_echoed) skip_until = std::max(skip_until, prefill.size());
        while (index < positions.size() && consumed < skip_until) consumed += positions[index++].value("token", "").size();
        if (inline_reasoning)
            while (index < positions.size() && whitespace_only(positions[index].value("token", ""))) ++index;
        std::vector<TokenLogprob> first;
        if (index < positions.size()) first = top_entries(positions[index]);
        if (first.size() > static_cast<std::size_t>(*request.logprobs_top_k)) first.resize(*request.logprobs_top_k);
        result.first_content_token_logprobs = std::move(first);
    }

    if (const auto* choices = request.constraint.choice_set()) {
        if (std::find(choices->choices.begin(), choices->choices.end(), result.text) == choices->choices.end())
            throw BackendError(ErrorKind::constraint_rejected,
                               "server output '" + result.text + "' violates the choice constraint");
    }
    return result;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)), in_flight_(0) {
    const auto scheme_end = config_.url.find("://");
    if (scheme_end == std::string::npos) throw std::invalid_argument("backend url needs a scheme: " + config_.url);
    const auto path_start = config_.url.find('/', scheme_end + 3);
    origin_ = config_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/v1/chat/completions" : config_.url.substr(path_start);
    if (config_.max_in_flight < 1 || config_.max_in_flight > 4096)
        throw std::invalid_argument("max_in_flight must be within [1, 4096]");
    in_flight_.release(config_.max_in_flight);
}

HttpBackend::~HttpBackend() = default;

Capabilities HttpBackend::capabilities() const {
    const auto& d = config_.dialect;
    Capabilities caps;
    caps.supports_choice_set = !d.choice_field.empty();
    caps.supports_json_schema = d.json_schema_as_response_format || !d.json_schema_field.empty();
    caps.supports_prefill = d.supports_prefill;
    caps.max_logprobs = config_.max_logprobs;
    caps.supports_reasoning_toggle = !d.reasoning_toggle_field.empty();
    return caps;
}

GenerationResult HttpBackend::generate(const GenerationRequest& request) {
    check_request(request, capabilities());
    const std::string body = build_chat_request(request, config_).dump();

    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<4096>& sem;
        ~Release() { sem.release(); }
    } release{in_flight_};

    auto backoff = config_.initial_backoff;
    for (int attempt_no = 1;; ++attempt_no) {
        try {
            return attempt(request, body);
        } catch (const BackendError& e) {
            if (!e.retryable() || attempt_no >= config_.max_attempts) throw;
        }
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
    }
}

GenerationResult HttpBackend::attempt(const GenerationRequest& request, const std::string& body) {
    httplib::Client client(origin_);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - seconds);
    client.set_connection_timeout(seconds.count(), usec.count());
    client.set_read_timeout(seconds.count(), usec.count());
    client.set_write_timeout(seconds.count(), usec.count());
    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    auto response = client.Post(path_, headers, body, "application/json");
    if (!response) {
        const auto error = response.error();
        if (error == httplib::Error::Read || error == httplib::Error::Write || error == httplib::Error::ConnectionTimeout)
            throw BackendError(ErrorKind::timeout, "request timed out: " + httplib::to_string(error));
        throw BackendError(ErrorKind::transport, "transport failure: " + httplib::to_string(error));
    }
    const int status = response->status;
    if (status == 429 || status >= 500)
        throw BackendError(ErrorKind::transport, "server returned HTTP " + std::to_string(status));
    if (status == 400 || status == 422)
        throw BackendError(ErrorKind::constraint_rejected, "server rejected request (HTTP " + std::to_string(status) +
                                                               "): " + response->body.substr(0, 500));
    if (status != 200) {
        // Authentication and routing errors are not worth retrying.
        throw BackendError(ErrorKind::capability_unsupported,
                           "server returned HTTP " + std::to_string(status) + ": " + response->body.substr(0, 500));
    }
    auto parsed = json::parse(response->body, nullptr, false);
    if (parsed.is_discarded()) throw BackendError(ErrorKind::transport, "response body is not JSON");
    return parse_chat_response(parsed, request, config_.dialect);
}

}  // namespace surveysim::backend
