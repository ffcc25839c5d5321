#pragma once

#include <array>
#include <string>

#include "surveysim/survey/prompts.hpp"

namespace surveysim::methods {

enum class MethodId {
    first_token_probabilities,
    first_token_restricted,
    answer_prefix,
    restricted_choice,
    restricted_reasoning,
    verbalized_distribution,
    open_ended_classification,
    open_ended_distribution,
};

inline constexpr std::array<MethodId, 8> kAllMethods{
    MethodId::first_token_probabilities, MethodId::first_token_restricted,    MethodId::answer_prefix,
    MethodId::restricted_choice,         MethodId::restricted_reasoning,      MethodId::verbalized_distribution,
    MethodId::open_ended_classification, MethodId::open_ended_distribution,
};

std::string to_string(MethodId method);
MethodId parse_method(const std::string& name);

// One row of the method overview: what each method does at generation time.
struct Taxonomy {
    bool reads_logprobs = false;
    bool format_instructions = false;
    bool restricts_vocabulary = false;
    bool open_output_first = false;
    bool produces_distribution = false;

    bool operator==(const Taxonomy&) const = default;
};

Taxonomy taxonomy(MethodId method);

bool is_token_method(MethodId method);
bool is_open_method(MethodId method);

// Prompt used for the first (or only) generation step.
survey::PromptKind prompt_kind(MethodId method);

}  // namespace surveysim::methods
