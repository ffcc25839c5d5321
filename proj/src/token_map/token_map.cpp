#include "surveysim/token_map/token_map.hpp"

#include <cmath>

namespace surveysim::token_map {

namespace {

bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::string normalize_token(std::string_view token) {
    static constexpr std::string_view kMarkers[] = {"\xC4\xA0", "\xE2\x96\x81", "\xC4\x8A"};  // Ġ ▁ Ċ
    for (bool stripped = true; stripped && !token.empty();) {
        stripped = false;
        if (token.front() == ' ' || token.front() == '\t' || token.front() == '\n' || token.front() == '\r') {
            token.remove_prefix(1);
            stripped = true;
            continue;
        }
        for (auto marker : kMarkers) {
            if (starts_with(token, marker)) {
                token.remove_prefix(marker.size());
                stripped = true;
                break;
            }
        }
    }
    std::string out;
    out.reserve(token.size());
    for (std::size_t i = 0; i < token.size(); ++i) {
        const auto c = static_cast<unsigned char>(token[i]);
        // Ä Ö Ü (C3 84 / C3 96 / C3 9C) fold to ä ö ü.
        if (c == 0xC3 && i + 1 < token.size()) {
            auto next = static_cast<unsigned char>(token[i + 1]);
            if (next == 0x84 || next == 0x96 || next == 0x9C) next += 0x20;
            out += static_cast<char>(c);
            out += static_cast<char>(next);
            ++i;
            continue;
        }
        out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
    }
    return out;
}

OptionSurfaceIndex build_index(const survey::PresentedScale& presented) {
    OptionSurfaceIndex index;
    for (const auto& entry : presented.entries) {
        index.option_ids.push_back(entry.option_id);
        auto& forms = index.surfaces[entry.option_id];
        auto it = presented.answer_surface_forms.find(entry.option_id);
        if (it != presented.answer_surface_forms.end())
            for (const auto& surface : it->second) forms.push_back(normalize_token(surface));
        forms.push_back(normalize_token(entry.label));
    }
    return index;
}

MatchResult match_token(std::string_view token_text, const OptionSurfaceIndex& index) {
    const auto token = normalize_token(token_text);
    if (token.empty()) return NoMatch{};

    const std::string* exact = nullptr;
    std::size_t exact_count = 0;
    const std::string* prefixed = nullptr;
    std::size_t prefix_count = 0;
    for (const auto& id : index.option_ids) {
        bool is_exact = false;
        bool is_prefix = false;
        for (const auto& surface : index.surfaces.at(id)) {
            is_exact = is_exact || surface == token;
            is_prefix = is_prefix || starts_with(surface, token);
        }
        if (is_exact) {
            exact = &id;
            ++exact_count;
        }
        if (is_prefix) {
            prefixed = &id;
            ++prefix_count;
        }
    }
    if (exact_count == 1) return *exact;
    if (exact_count > 1 || prefix_count > 1) return Ambiguous{};
    if (prefix_count == 1) return *prefixed;
    return NoMatch{};
}

std::string to_string(Validity validity) {
    switch (validity) {
        case Validity::full: return "full";
        case Validity::partial: return "partial";
        case Validity::invalid: return "invalid";
    }
    return "invalid";
}

FirstTokenDistribution aggregate_first_token(std::span<const backend::TokenLogprob> logprobs,
                                             const OptionSurfaceIndex& index) {
    std::map<std::string, double> mass;
    for (const auto& id : index.option_ids) mass[id] = 0.0;
    double total = 0.0;
    for (const auto& entry : logprobs) {
        const auto match = match_token(entry.token_text, index);
        if (const auto* id = std::get_if<std::string>(&match)) {
            const double p = std::exp(entry.logprob);
            mass[*id] += p;
            total += p;
        }
    }
    FirstTokenDistribution result;
    result.matched_mass = total;
    if (!(total > 0.0)) return result;
    bool any_zero = false;
    for (auto& [id, p] : mass) {
        p /= total;
        any_zero = any_zero || p == 0.0;
    }
    result.distribution = std::move(mass);
    result.validity = any_zero ? Validity::partial : Validity::full;
    return result;
}

}  // namespace surveysim::token_map
