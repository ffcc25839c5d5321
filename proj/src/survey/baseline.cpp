#include "surveysim/survey/baseline.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace surveysim::survey {

std::map<std::string, std::string> stratified_baseline(const Dataset& dataset, const std::string& question_id,
                                                       std::uint64_t seed) {
    std::vector<std::string> ids;
    std::vector<std::string> truths;
    for (const auto& r : dataset.respondents) {
        const auto* truth = r.truth(question_id);
        if (!truth) throw SurveyError("respondent '" + r.id + "' has no ground truth for '" + question_id + "'");
        ids.push_back(r.id);
        truths.push_back(*truth);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(truths.begin(), truths.end(), rng);
    std::map<std::string, std::string> assignment;
    for (std::size_t i = 0; i < ids.size(); ++i) assignment.emplace(ids[i], truths[i]);
    return assignment;
}

}  // namespace surveysim::survey
