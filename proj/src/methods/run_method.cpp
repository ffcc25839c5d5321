#include "surveysim/methods/run_method.hpp"

#include <chrono>

#include "surveysim/methods/schemas.hpp"
#include "surveysim/survey/scale.hpp"
#include "surveysim/token_map/token_map.hpp"

namespace surveysim::methods {

namespace {

using backend::BackendError;
using backend::GenerationConstraint;
using backend::GenerationRequest;

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r\n") == std::string::npos; }

std::optional<std::string> optional_string(const nlohmann::json& doc, const char* key) {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    return doc[key].get<std::string>();
}

nlohmann::json optional_json(const std::optional<std::string>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::int64_t derived_seed(const harness::SimulationSpec& spec, const std::string& salt) {
    if (spec.decoding == harness::Decoding::greedy) return 0;
    return static_cast<std::int64_t>(harness::stable_hash64(spec.canonical() + salt) & 0x7fffffffULL);
}

GenerationRequest make_request(const survey::PromptBundle& prompts, const harness::SimulationSpec& spec,
                               const survey::Respondent& respondent, const survey::PresentedScale& presented,
                               const std::string& step) {
    GenerationRequest request;
    request.system_text = prompts.system_text;
    request.user_text = prompts.user_text;
    request.assistant_prefill = prompts.assistant_prefill;
    request.context.respondent_id = respondent.id;
    request.context.question_id = spec.question_id;
    request.context.method = to_string(spec.method);
    request.context.step = step;
    for (const auto& entry : presented.entries) request.context.answer_labels.emplace_back(entry.option_id, entry.label);
    return request;
}

}  // namespace

std::string RunRecord::validity() const {
    if (prediction.is_invalid()) return "invalid";
    if (prediction.is_partial()) return "partial";
    return "valid";
}

nlohmann::json RunRecord::to_json() const {
    nlohmann::json doc = {{"key", key}, {"spec", spec.to_json()}, {"respondent", respondent_id}};
    doc["prediction"] = prediction_to_json(prediction);
    doc["validity"] = validity();
    doc["raw_output"] = prediction.raw_output;
    doc["reasoning_text"] = optional_json(prediction.reasoning_text);
    doc["open_text"] = optional_json(open_text);
    doc["finish_reason"] = backend::to_string(finish_reason);
    doc["error_kind"] = optional_json(error_kind);
    doc["error"] = optional_json(error);
    doc["degraded"] = degraded;
    doc["flags"] = {{"logprobs_read", flags.logprobs_read},
                    {"format_instructions", flags.format_instructions},
                    {"vocabulary_restricted", flags.vocabulary_restricted},
                    {"open_output_first", flags.open_output_first},
                    {"distribution_produced", flags.distribution_produced}};
    doc["elapsed_ms"] = elapsed_ms;
    return doc;
}

RunRecord RunRecord::from_json(const nlohmann::json& doc) {
    RunRecord record;
    record.key = doc.at("key").get<std::string>();
    record.spec = harness::SimulationSpec::from_json(doc.at("spec"));
    record.respondent_id = doc.at("respondent").get<std::string>();
    record.prediction = prediction_from_json(doc.at("prediction"));
    record.prediction.raw_output = doc.value("raw_output", "");
    record.prediction.reasoning_text = optional_string(doc, "reasoning_text");
    if (auto* invalid = std::get_if<Invalid>(&record.prediction.value)) invalid->raw_text = record.prediction.raw_output;
    record.open_text = optional_string(doc, "open_text");
    record.finish_reason = backend::parse_finish_reason(doc.value("finish_reason", "stop"));
    record.error_kind = optional_string(doc, "error_kind");
    record.error = optional_string(doc, "error");
    record.degraded = doc.value("degraded", false);
    const auto flags = doc.value("flags", nlohmann::json::object());
    record.flags.logprobs_read = flags.value("logprobs_read", false);
    record.flags.format_instructions = flags.value("format_instructions", false);
    record.flags.vocabulary_restricted = flags.value("vocabulary_restricted", false);
    record.flags.open_output_first = flags.value("open_output_first", false);
    record.flags.distribution_produced = flags.value("distribution_produced", false);
    record.elapsed_ms = doc.value("elapsed_ms", 0.0);
    return record;
}

std::string OpenCache::key_for(const harness::SimulationSpec& spec, const std::string& respondent_id) {
    auto shared = spec;
    shared.method = MethodId::open_ended_classification;  // both open methods share step one
    return shared.record_key(respondent_id);
}

OpenOutput OpenCache::get_or_generate(const std::string& key, const std::function<OpenOutput()>& generate) {
    std::promise<OpenOutput> promise;
    std::shared_future<OpenOutput> future;
    bool owner = false;
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            future = promise.get_future().share();
            entries_.emplace(key, future);
            owner = true;
            ++generated_;
        } else {
            future = it->second;
        }
    }
    if (owner) {
        try {
            promise.set_value(generate());
        } catch (...) {
            promise.set_exception(std::current_exception());
        }
    }
    return future.get();
}

void OpenCache::prime(const std::string& key, OpenOutput output) {
    std::lock_guard lock(mutex_);
    if (entries_.contains(key)) return;
    std::promise<OpenOutput> promise;
    promise.set_value(std::move(output));
    entries_.emplace(key, promise.get_future().share());
}

std::size_t OpenCache::generated() const {
    std::lock_guard lock(mutex_);
    return generated_;
}

OpenOutput open_step(const harness::SimulationSpec& spec, const survey::Respondent& respondent,
                     const MethodEnvironment& env) {
    const auto generate = [&]() -> OpenOutput {
        const auto& question = env.schema->question(spec.question_id);
        const auto presented = survey::render_scale(question, spec.variant);
        const auto prompts = survey::render_prompts(*env.templates, *env.schema, respondent, question, presented,
                                                    survey::PromptKind::open_generation);
        auto request = make_request(prompts, spec, respondent, presented, "open");
        request.sampling = spec.sampling(env.max_tokens.open);
        request.sampling.seed = derived_seed(spec, "open:" + respondent.id);
        request.reasoning_enabled = env.reasoning_enabled;
        OpenOutput output;
        try {
            auto result = env.backend->generate(request);
            output.text = std::move(result.text);
            output.reasoning_text = std::move(result.reasoning_text);
            output.finish_reason = result.finish_reason;
        } catch (const BackendError& e) {
            output.finish_reason = backend::FinishReason::error;
            output.error_kind = backend::to_string(e.kind());
            output.error = e.what();
        }
        return output;
    };
    if (!env.open_cache) return generate();
    return env.open_cache->get_or_generate(OpenCache::key_for(spec, respondent.id), generate);
}

Classification classify_open(const std::string& open_text, const harness::SimulationSpec& spec,
                             const survey::Respondent& respondent, const MethodEnvironment& env, ClassifyMode mode) {
    Classification out;
    if (blank(open_text)) {
        out.prediction = make_invalid(open_text);
        return out;
    }
    const auto& question = env.schema->question(spec.question_id);
    const auto presented = survey::render_scale(question, spec.variant);
    const auto kind =
        mode == ClassifyMode::choice ? survey::PromptKind::classify_choice : survey::PromptKind::classify_distribution;
    const auto prompts = survey::render_classification_prompts(question, presented, open_text, kind);
    auto request = make_request(prompts, spec, respondent, presented, "classify");
    request.sampling.mode = backend::DecodingMode::sampled;
    request.sampling.temperature = env.classification_temperature;
    request.sampling.seed = derived_seed(spec, "classify:" + respondent.id);
    if (request.sampling.seed == 0) request.sampling.seed = static_cast<std::int64_t>(harness::stable_hash64(respondent.id) & 0x7fffffff);
    request.sampling.max_tokens = env.max_tokens.classify;
    request.reasoning_enabled = env.reasoning_enabled;
    if (env.backend->capabilities().supports_json_schema) {
        request.constraint.variant = backend::JsonSchema{mode == ClassifyMode::choice
                                                             ? build_choice_schema(presented, question.language)
                                                             : build_distribution_schema(presented)};
    } else {
        out.degraded = true;
    }
    auto result = env.backend->generate(request);
    out.finish_reason = result.finish_reason;
    out.prediction = mode == ClassifyMode::choice ? parse_choice(result.text, presented, question.language)
                                                  : parse_distribution(result.text, presented);
    return out;
}

RunRecord run_method(const harness::SimulationSpec& spec, const survey::Respondent& respondent,
                     const MethodEnvironment& env) {
    const auto started = std::chrono::steady_clock::now();
    RunRecord record;
    record.spec = spec;
    record.respondent_id = respondent.id;
    record.key = spec.record_key(respondent.id);

    const auto& question = env.schema->question(spec.question_id);
    const auto presented = survey::render_scale(question, spec.variant);
    const auto method = spec.method;
    const bool schema_support = env.backend->capabilities().supports_json_schema;

    auto fail = [&](const BackendError& e, std::string raw) {
        record.prediction = make_invalid(std::move(raw));
        record.finish_reason = backend::FinishReason::error;
        record.error_kind = backend::to_string(e.kind());
        record.error = e.what();
    };

    if (is_open_method(method)) {
        record.flags.open_output_first = true;
        record.flags.distribution_produced = method == MethodId::open_ended_distribution;
        const auto open = open_step(spec, respondent, env);
        record.open_text = open.text;
        if (open.error) {
            record.prediction = make_invalid(open.text);
            record.finish_reason = backend::FinishReason::error;
            record.error_kind = open.error_kind;
            record.error = "open step: " + *open.error;
        } else {
            try {
                auto classified = classify_open(open.text, spec, respondent, env,
                                                method == MethodId::open_ended_distribution ? ClassifyMode::distribution
                                                                                            : ClassifyMode::choice);
                record.prediction = std::move(classified.prediction);
                record.finish_reason = classified.finish_reason;
                record.degraded = classified.degraded;
            } catch (const BackendError& e) {
                fail(e, "");
            }
        }
        if (!record.prediction.reasoning_text) record.prediction.reasoning_text = open.reasoning_text;
    } else {
        const auto prompts = survey::render_prompts(*env.templates, *env.schema, respondent, question, presented,
                                                    prompt_kind(method));
        auto request = make_request(prompts, spec, respondent, presented, "main");
        request.reasoning_enabled = env.reasoning_enabled;
        record.flags.format_instructions = true;

        int max_tokens = env.max_tokens.restricted;
        if (is_token_method(method)) {
            max_tokens = env.max_tokens.token;
            request.logprobs_top_k = std::min(env.logprobs_top_k, env.backend->capabilities().max_logprobs);
            if (method != MethodId::first_token_probabilities)
                request.constraint.variant = backend::ChoiceSet{presented.labels()};
            record.flags.logprobs_read = true;
            record.flags.distribution_produced = true;
        } else {
            if (method == MethodId::restricted_reasoning) {
                max_tokens = env.max_tokens.reasoning;
                record.flags.open_output_first = true;
            }
            record.flags.distribution_produced = method == MethodId::verbalized_distribution;
            if (schema_support) {
                switch (method) {
                    case MethodId::restricted_choice:
                        request.constraint.variant = backend::JsonSchema{build_choice_schema(presented, question.language)};
                        break;
                    case MethodId::restricted_reasoning:
                        request.constraint.variant =
                            backend::JsonSchema{build_reasoning_schema(presented, question.language)};
                        break;
                    default:
                        request.constraint.variant = backend::JsonSchema{build_distribution_schema(presented)};
                }
            } else {
                record.degraded = true;
            }
        }
        if (env.reasoning_enabled) max_tokens = std::max(max_tokens, env.max_tokens.reasoning);
        request.sampling = spec.sampling(max_tokens);
        request.sampling.seed = derived_seed(spec, "main:" + respondent.id);
        record.flags.vocabulary_restricted = !request.constraint.is_unconstrained();

        try {
            auto result = env.backend->generate(request);
            record.finish_reason = result.finish_reason;
            if (is_token_method(method)) {
                const auto index = token_map::build_index(presented);
                const auto logprobs = result.first_content_token_logprobs.value_or(std::vector<backend::TokenLogprob>{});
                const auto aggregated = token_map::aggregate_first_token(logprobs, index);
                if (aggregated.validity == token_map::Validity::invalid) {
                    record.prediction = make_invalid(result.text);
                } else {
                    Distribution dist;
                    dist.coverage = aggregated.validity == token_map::Validity::full ? Coverage::full : Coverage::partial;
                    for (const auto& entry : presented.entries)
                        dist.probabilities.emplace_back(entry.option_id, aggregated.distribution.at(entry.option_id));
                    record.prediction.value = std::move(dist);
                    record.prediction.raw_output = result.text;
                }
            } else if (method == MethodId::verbalized_distribution) {
                record.prediction = parse_distribution(result.text, presented);
            } else {
                record.prediction = parse_choice(result.text, presented, question.language,
                                                 method == MethodId::restricted_reasoning ? ChoiceFormat::with_reasoning
                                                                                          : ChoiceFormat::answer_only);
            }
            if (result.reasoning_text) record.prediction.reasoning_text = result.reasoning_text;
        } catch (const BackendError& e) {
            fail(e, "");
        }
    }
    record.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return record;
}

}  // namespace surveysim::methods
