#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "surveysim/survey/types.hpp"

namespace surveysim::survey {

// Stratified baseline: the question's ground-truth responses shuffled across
// respondents with a seeded uniform permutation. Every respondent must carry
// ground truth for the question.
std::map<std::string, std::string> stratified_baseline(const Dataset& dataset, const std::string& question_id,
                                                       std::uint64_t seed);

}  // namespace surveysim::survey
