#include "surveysim/methods/method_id.hpp"

#include <stdexcept>

namespace surveysim::methods {

std::string to_string(MethodId method) {
    switch (method) {
        case MethodId::first_token_probabilities: return "first_token_probabilities";
        case MethodId::first_token_restricted: return "first_token_restricted";
        case MethodId::answer_prefix: return "answer_prefix";
        case MethodId::restricted_choice: return "restricted_choice";
        case MethodId::restricted_reasoning: return "restricted_reasoning";
        case MethodId::verbalized_distribution: return "verbalized_distribution";
        case MethodId::open_ended_classification: return "open_ended_classification";
        case MethodId::open_ended_distribution: return "open_ended_distribution";
    }
    return "unknown";
}

MethodId parse_method(const std::string& name) {
    for (auto method : kAllMethods)
        if (to_string(method) == name) return method;
    throw std::invalid_argument("unknown method '" + name + "'");
}

Taxonomy taxonomy(MethodId method) {
    //                                    logprobs format restrict open-first distribution
    switch (method) {
        case MethodId::first_token_probabilities: return {true, true, false, false, true};
        case MethodId::first_token_restricted: return {true, true, true, false, true};
        case MethodId::answer_prefix: return {true, true, true, false, true};
        case MethodId::restricted_choice: return {false, true, true, false, false};
        case MethodId::restricted_reasoning: return {false, true, true, true, false};
        case MethodId::verbalized_distribution: return {false, true, true, false, true};
        case MethodId::open_ended_classification: return {false, false, false, true, false};
        case MethodId::open_ended_distribution: return {false, false, false, true, true};
    }
    throw std::invalid_argument("unknown method");
}

bool is_token_method(MethodId method) { return taxonomy(method).reads_logprobs; }

bool is_open_method(MethodId method) {
    return method == MethodId::open_ended_classification || method == MethodId::open_ended_distribution;
}

survey::PromptKind prompt_kind(MethodId method) {
    using survey::PromptKind;
    switch (method) {
        case MethodId::first_token_probabilities:
        case MethodId::first_token_restricted: return PromptKind::token_probability;
        case MethodId::answer_prefix: return PromptKind::answer_prefix;
        case MethodId::restricted_choice: return PromptKind::restricted_choice;
        case MethodId::restricted_reasoning: return PromptKind::restricted_reasoning;
        case MethodId::verbalized_distribution: return PromptKind::verbalized_distribution;
        case MethodId::open_ended_classification:
        case MethodId::open_ended_distribution: return PromptKind::open_generation;
    }
    throw std::invalid_argument("unknown method");
}

}  // namespace surveysim::methods
