#pragma once

#include <string>

#include "surveysim/survey/types.hpp"

namespace surveysim::survey {

// "A", "B", ..., "Z", "AA", "AB", ...
std::string index_label(std::size_t position);

// Presentation of a question's options under one of the four scale variants.
// Indexed variants accept the full text and aliases as answer surfaces too.
PresentedScale render_scale(const SurveyQuestion& question, ScaleVariant variant);

}  // namespace surveysim::survey
