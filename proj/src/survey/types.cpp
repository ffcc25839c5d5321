#include "surveysim/survey/types.hpp"

#include <algorithm>
#include <set>

namespace surveysim::survey {

void SurveyQuestion::validate() const {
    if (id.empty()) throw SurveyError("question without id");
    if (options.size() < 2) throw SurveyError("question '" + id + "' needs at least 2 options");
    std::set<std::string> ids;
    std::map<std::string, std::string> surface_owner;
    for (const auto& option : options) {
        if (option.id.empty()) throw SurveyError("question '" + id + "' has an option without id");
        if (option.full_text.empty())
            throw SurveyError("option '" + option.id + "' of question '" + id + "' has empty text");
        if (!ids.insert(option.id).second)
            throw SurveyError("duplicate option id '" + option.id + "' in question '" + id + "'");
        std::set<std::string> own{option.full_text};
        own.insert(option.aliases.begin(), option.aliases.end());
        for (const auto& surface : own) {
            auto [it, inserted] = surface_owner.emplace(surface, option.id);
            if (!inserted && it->second != option.id)
                throw SurveyError("surface string '" + surface + "' shared by options '" + it->second +
                                  "' and '" + option.id + "'");
        }
    }
}

std::size_t SurveyQuestion::index_of(const std::string& option_id) const {
    for (std::size_t i = 0; i < options.size(); ++i)
        if (options[i].id == option_id) return i;
    throw SurveyError("unknown option id '" + option_id + "' for question '" + id + "'");
}

bool SurveyQuestion::has_option(const std::string& option_id) const {
    return std::any_of(options.begin(), options.end(),
                       [&](const ResponseOption& o) { return o.id == option_id; });
}

std::string ScaleVariant::name() const {
    std::string result = labeling == Labeling::full_text ? "full_text" : "indexed";
    result += order == Order::original ? "_original" : "_reversed";
    return result;
}

ScaleVariant ScaleVariant::parse(const std::string& name) {
    for (const auto& variant : all())
        if (variant.name() == name) return variant;
    throw SurveyError("unknown scale variant '" + name + "'");
}

std::vector<ScaleVariant> ScaleVariant::all() {
    return {{Labeling::full_text, Order::original},
            {Labeling::full_text, Order::reversed},
            {Labeling::indexed, Order::original},
            {Labeling::indexed, Order::reversed}};
}

std::vector<std::string> PresentedScale::labels() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.label);
    return out;
}

std::optional<std::string> PresentedScale::option_for_label(const std::string& label) const {
    for (const auto& e : entries)
        if (e.label == label) return e.option_id;
    return std::nullopt;
}

const std::string& PresentedScale::label_for(const std::string& option_id) const {
    for (const auto& e : entries)
        if (e.option_id == option_id) return e.label;
    throw SurveyError("option '" + option_id + "' not in presented scale");
}

const std::string* Respondent::attribute(const std::string& name) const {
    auto it = attributes.find(name);
    return it == attributes.end() ? nullptr : &it->second;
}

const std::string* Respondent::truth(const std::string& question_id) const {
    auto it = ground_truth.find(question_id);
    return it == ground_truth.end() ? nullptr : &it->second;
}

const AttributeSpec* DatasetSchema::attribute(const std::string& name) const {
    for (const auto& a : attributes)
        if (a.name == name) return &a;
    return nullptr;
}

const SurveyQuestion& DatasetSchema::question(const std::string& question_id) const {
    for (const auto& q : questions)
        if (q.id == question_id) return q;
    throw SurveyError("unknown question '" + question_id + "'");
}

const Respondent& Dataset::respondent(const std::string& respondent_id) const {
    for (const auto& r : respondents)
        if (r.id == respondent_id) return r;
    throw SurveyError("unknown respondent '" + respondent_id + "'");
}

std::string to_string(Language language) { return language == Language::EN ? "EN" : "DE"; }

Language parse_language(const std::string& text) {
    if (text == "EN" || text == "en") return Language::EN;
    if (text == "DE" || text == "de") return Language::DE;
    throw SurveyError("unsupported language '" + text + "'");
}

std::string to_string(ScaleKind kind) { return kind == ScaleKind::categorical ? "categorical" : "ordinal"; }

ScaleKind parse_scale_kind(const std::string& text) {
    if (text == "categorical") return ScaleKind::categorical;
    if (text == "ordinal") return ScaleKind::ordinal;
    throw SurveyError("unknown scale kind '" + text + "'");
}

}  // namespace surveysim::survey
