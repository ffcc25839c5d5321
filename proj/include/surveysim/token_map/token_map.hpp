#pragma once

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "surveysim/backend/types.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::token_map {

// Normalized surface forms per option id, for one scale variant.
struct OptionSurfaceIndex {
    std::vector<std::string> option_ids;  // presentation order
    std::map<std::string, std::vector<std::string>> surfaces;
};

// Built from a presented scale's answer_surface_forms.
OptionSurfaceIndex build_index(const survey::PresentedScale& presented);

// Strips leading whitespace and byte-level space markers ("Ġ", "▁", "Ċ"), then
// case-folds (ASCII and German umlauts).
std::string normalize_token(std::string_view token_text);

struct Ambiguous {};
struct NoMatch {};
using MatchResult = std::variant<std::string, Ambiguous, NoMatch>;

// A token maps to an option when it equals one of that option's surfaces
// exactly and no other option's, or otherwise when it is a prefix of surfaces
// of exactly one option.
MatchResult match_token(std::string_view token_text, const OptionSurfaceIndex& index);

enum class Validity { full, partial, invalid };
std::string to_string(Validity validity);

struct FirstTokenDistribution {
    std::map<std::string, double> distribution;  // every option id; empty when invalid
    Validity validity = Validity::invalid;
    double matched_mass = 0.0;
};

// Sums token probabilities per matched option and renormalizes over the
// matched mass. Ambiguous and unmatched tokens contribute nothing.
FirstTokenDistribution aggregate_first_token(std::span<const backend::TokenLogprob> logprobs,
                                             const OptionSurfaceIndex& index);

}  // namespace surveysim::token_map
