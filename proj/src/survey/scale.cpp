#include "surveysim/survey/scale.hpp"

#include <algorithm>

namespace surveysim::survey {

std::string index_label(std::size_t position) {
    std::string label;
    ++position;
    while (position > 0) {
        --position;
        label.insert(label.begin(), static_cast<char>('A' + position % 26));
        position /= 26;
    }
    return label;
}

PresentedScale render_scale(const SurveyQuestion& question, ScaleVariant variant) {
    std::vector<const ResponseOption*> ordered;
    for (const auto& option : question.options) ordered.push_back(&option);
    if (variant.order == Order::reversed) std::reverse(ordered.begin(), ordered.end());

    PresentedScale presented;
    presented.variant = variant;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto& option = *ordered[i];
        std::vector<std::string> surfaces;
        std::string label;
        if (variant.labeling == Labeling::indexed) {
            label = index_label(i);
            surfaces.push_back(label);
        } else {
            label = option.full_text;
        }
        surfaces.push_back(option.full_text);
        surfaces.insert(surfaces.end(), option.aliases.begin(), option.aliases.end());
        presented.entries.push_back({label, option.id});
        presented.answer_surface_forms.emplace(option.id, std::move(surfaces));
    }
    return presented;
}

}  // namespace surveysim::survey
