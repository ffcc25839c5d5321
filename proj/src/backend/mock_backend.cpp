#include "surveysim/backend/mock_backend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "surveysim/backend/json_schema.hpp"

namespace surveysim::backend {

namespace {

using ojson = nlohmann::ordered_json;

bool listed(const std::vector<std::string>& allowed, const std::string& value) {
    return allowed.empty() || std::find(allowed.begin(), allowed.end(), value) != allowed.end();
}

std::vector<std::string> string_list(const ojson& doc, const char* key) {
    std::vector<std::string> out;
    if (auto it = doc.find(key); it != doc.end()) out = it->get<std::vector<std::string>>();
    return out;
}

MockBehaviorKind parse_kind(const std::string& name) {
    if (name == "echo_truth") return MockBehaviorKind::echo_truth;
    if (name == "uniform_distribution") return MockBehaviorKind::uniform_distribution;
    if (name == "token_distribution") return MockBehaviorKind::token_distribution;
    if (name == "fixed_text") return MockBehaviorKind::fixed_text;
    if (name == "garbage") return MockBehaviorKind::garbage;
    if (name == "partial_json") return MockBehaviorKind::partial_json;
    if (name == "fail") return MockBehaviorKind::fail;
    throw std::invalid_argument("unknown mock behavior '" + name + "'");
}

ErrorKind parse_error_kind(const std::string& name) {
    for (auto kind : {ErrorKind::transport, ErrorKind::capability_unsupported, ErrorKind::constraint_rejected,
                      ErrorKind::timeout, ErrorKind::unmatched})
        if (to_string(kind) == name) return kind;
    throw std::invalid_argument("unknown error kind '" + name + "'");
}

// Output for a request given the mass the mock puts on each presentation label.
struct Shaped {
    std::string text;
    std::vector<TokenLogprob> tokens;
};

Shaped shape_answer(const GenerationRequest& request, const std::vector<std::pair<std::string, double>>& mass) {
    Shaped out;
    const auto best = std::max_element(mass.begin(), mass.end(),
                                       [](const auto& a, const auto& b) { return a.second < b.second; });
    const std::string top = best == mass.end() ? std::string{} : best->first;

    if (const auto* schema = request.constraint.json_schema()) {
        const auto& doc = schema->schema;
        std::string answer_key;
        std::string reasoning_key;
        if (auto props = doc.find("properties"); props != doc.end()) {
            for (const auto& [key, child] : props->items()) {
                if (child.contains("enum"))
                    answer_key = key;
                else if (child.value("type", "") == "string")
                    reasoning_key = key;
            }
        }
        ojson body = ojson::object();
        if (!answer_key.empty()) {
            if (!reasoning_key.empty()) body[reasoning_key] = "Weighing the persona against the options.";
            body[answer_key] = top;
        } else {
            for (const auto& [label, p] : mass) body[label] = p;
        }
        out.text = body.dump();
        return out;
    }
    out.text = request.context.step == "open" ? "My answer is " + top + "." : top;
    for (const auto& [label, p] : mass)
        if (p > 0) out.tokens.push_back({label, std::log(p)});
    return out;
}

}  // namespace

bool MockMatcher::matches(const GenerationRequest& request) const {
    const auto& ctx = request.context;
    if (!listed(respondents, ctx.respondent_id) || !listed(questions, ctx.question_id) ||
        !listed(methods, ctx.method) || !listed(steps, ctx.step))
        return false;
    if (constraint && *constraint != request.constraint.kind_name()) return false;
    if (system_contains && request.system_text.find(*system_contains) == std::string::npos) return false;
    if (user_contains && request.user_text.find(*user_contains) == std::string::npos) return false;
    return true;
}

MockBehavior parse_mock_behavior(const ojson& document) {
    MockBehavior behavior;
    if (document.is_string()) {
        behavior.kind = parse_kind(document.get<std::string>());
    } else {
        behavior.kind = parse_kind(document.at("kind").get<std::string>());
        behavior.text = document.value("text", "");
        if (auto it = document.find("tokens"); it != document.end()) {
            for (const auto& [token, p] : it->items()) behavior.tokens.emplace_back(token, p.get<double>());
        }
        if (auto it = document.find("reasoning"); it != document.end()) behavior.reasoning = it->get<std::string>();
        if (auto it = document.find("error"); it != document.end())
            behavior.error_kind = parse_error_kind(it->get<std::string>());
        behavior.ignore_constraints = document.value("ignore_constraints", false);
    }
    if (behavior.kind == MockBehaviorKind::garbage || behavior.kind == MockBehaviorKind::partial_json)
        behavior.ignore_constraints = true;
    for (const auto& [token, p] : behavior.tokens)
        if (!(p > 0 && p <= 1)) throw std::invalid_argument("token probability for '" + token + "' outside (0,1]");
    return behavior;
}

MockScript parse_mock_script(const ojson& document) {
    MockScript script;
    script.strict = document.value("strict", false);
    if (auto caps = document.find("capabilities"); caps != document.end()) {
        script.capabilities.supports_choice_set = caps->value("supports_choice_set", true);
        script.capabilities.supports_json_schema = caps->value("supports_json_schema", true);
        script.capabilities.supports_prefill = caps->value("supports_prefill", true);
        script.capabilities.max_logprobs = caps->value("max_logprobs", 20);
        script.capabilities.supports_reasoning_toggle = caps->value("supports_reasoning_toggle", true);
    }
    if (auto rules = document.find("rules"); rules != document.end()) {
        for (const auto& rule : *rules) {
            MockRule parsed;
            const auto match = rule.value("match", ojson::object());
            parsed.match.respondents = string_list(match, "respondents");
            parsed.match.questions = string_list(match, "questions");
            parsed.match.methods = string_list(match, "methods");
            parsed.match.steps = string_list(match, "steps");
            if (match.contains("constraint")) parsed.match.constraint = match["constraint"].get<std::string>();
            if (match.contains("system_contains"))
                parsed.match.system_contains = match["system_contains"].get<std::string>();
            if (match.contains("user_contains")) parsed.match.user_contains = match["user_contains"].get<std::string>();
            parsed.behavior = parse_mock_behavior(rule.at("behavior"));
            script.rules.push_back(std::move(parsed));
        }
    }
    if (auto fallback = document.find("default"); fallback != document.end())
        script.fallback = parse_mock_behavior(*fallback);
    return script;
}

MockScript load_mock_script(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mock script '" + path.string() + "'");
    return parse_mock_script(ojson::parse(in));
}

MockBackend::MockBackend(MockScript script, TruthTable truths)
    : script_(std::move(script)), truths_(std::move(truths)) {}

std::size_t MockBackend::call_count(const std::string& step) const {
    std::lock_guard lock(mutex_);
    auto it = calls_by_step_.find(step);
    return it == calls_by_step_.end() ? 0 : it->second;
}

GenerationResult MockBackend::generate(const GenerationRequest& request) {
    check_request(request, script_.capabilities);
    ++calls_;
    {
        std::lock_guard lock(mutex_);
        ++calls_by_step_[request.context.step];
    }
    for (const auto& rule : script_.rules)
        if (rule.match.matches(request)) return respond(request, rule.behavior);
    if (script_.fallback) return respond(request, *script_.fallback);
    if (script_.strict)
        throw BackendError(ErrorKind::unmatched, "no mock rule matches request for respondent '" +
                                                     request.context.respondent_id + "'");
    MockBehavior garbage;
    garbage.kind = MockBehaviorKind::garbage;
    return respond(request, garbage);
}

GenerationResult MockBackend::respond(const GenerationRequest& request, const MockBehavior& behavior) const {
    const auto& labels = request.context.answer_labels;
    Shaped shaped;
    switch (behavior.kind) {
        case MockBehaviorKind::echo_truth: {
            auto it = truths_.find({request.context.question_id, request.context.respondent_id});
            if (it == truths_.end())
                throw BackendError(ErrorKind::unmatched, "echo_truth: no ground truth for respondent '" +
                                                             request.context.respondent_id + "'");
            std::vector<std::pair<std::string, double>> mass;
            for (const auto& [option_id, label] : labels) mass.emplace_back(label, option_id == it->second ? 1.0 : 0.0);
            shaped = shape_answer(request, mass);
            break;
        }
        case MockBehaviorKind::uniform_distribution: {
            std::vector<std::pair<std::string, double>> mass;
            for (const auto& entry : labels) mass.emplace_back(entry.second, 1.0 / static_cast<double>(labels.size()));
            shaped = shape_answer(request, mass);
            break;
        }
        case MockBehaviorKind::token_distribution:
            for (const auto& [token, p] : behavior.tokens) shaped.tokens.push_back({token, std::log(p)});
            shaped.text = behavior.text.empty() && !behavior.tokens.empty() ? behavior.tokens.front().first
                                                                            : behavior.text;
            break;
        case MockBehaviorKind::fixed_text:
            shaped.text = behavior.text;
            shaped.tokens.push_back({behavior.text, 0.0});
            break;
        case MockBehaviorKind::garbage:
            shaped.text = behavior.text.empty() ? "zxq vlorp, no comment." : behavior.text;
            shaped.tokens = {{"zx", std::log(0.6)}, {" vl", std::log(0.4)}};
            break;
        case MockBehaviorKind::partial_json: {
            nlohmann::ordered_json body = nlohmann::ordered_json::object();
            if (!labels.empty()) body[labels.front().second] = 1.0;
            shaped.text = body.dump();
            shaped.tokens.push_back({labels.empty() ? std::string{"{"} : labels.front().second, 0.0});
            break;
        }
        case MockBehaviorKind::fail:
            throw BackendError(behavior.error_kind, "scripted failure");
    }

    const bool misbehaves = behavior.kind == MockBehaviorKind::garbage || behavior.kind == MockBehaviorKind::partial_json;
    if (!behavior.ignore_constraints && !misbehaves) {
        if (const auto* choices = request.constraint.choice_set()) {
            if (std::find(choices->choices.begin(), choices->choices.end(), shaped.text) == choices->choices.end())
                throw BackendError(ErrorKind::constraint_rejected, "output '" + shaped.text + "' outside choice set");
        }
        if (const auto* schema = request.constraint.json_schema()) {
            auto parsed = nlohmann::ordered_json::parse(shaped.text, nullptr, false);
            std::string why;
            if (parsed.is_discarded() || !schema_accepts(schema->schema, parsed, &why))
                throw BackendError(ErrorKind::constraint_rejected, "output violates schema: " + why);
        }
    }

    GenerationResult result;
    result.text = std::move(shaped.text);
    if (request.reasoning_enabled)
        result.reasoning_text = behavior.reasoning.value_or("Thinking about the persona and the options.");
    if (request.logprobs_top_k) {
        auto tokens = std::move(shaped.tokens);
        std::stable_sort(tokens.begin(), tokens.end(),
                         [](const TokenLogprob& a, const TokenLogprob& b) { return a.logprob > b.logprob; });
        const auto limit = static_cast<std::size_t>(std::min(*request.logprobs_top_k, script_.capabilities.max_logprobs));
        if (tokens.size() > limit) tokens.resize(limit);
        result.first_content_token_logprobs = std::move(tokens);
    }
    return result;
}

std::unique_ptr<MockBackend> script_mock(MockScript script, TruthTable truths) {
    return std::make_unique<MockBackend>(std::move(script), std::move(truths));
}

}  // namespace surveysim::backend
