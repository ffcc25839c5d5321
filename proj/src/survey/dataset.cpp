#include "surveysim/survey/dataset.hpp"

#include <fstream>
#include <set>
#include <unordered_map>

namespace surveysim::survey {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string resolve_truth(const SurveyQuestion& question, const std::string& cell) {
    for (const auto& option : question.options)
        if (option.id == cell) return option.id;
    for (const auto& option : question.options) {
        if (option.full_text == cell) return option.id;
        for (const auto& alias : option.aliases)
            if (alias == cell) return option.id;
    }
    throw SurveyError("ground-truth value '" + cell + "' is not a response option of question '" +
                      question.id + "'");
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    char c;
    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        if (!(row.size() == 1 && row[0].empty())) rows.push_back(std::move(row));
        row.clear();
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw SurveyError("malformed CSV: quote inside unquoted field");
                in_quotes = true;
                field_started = true;
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;
            case '\n':
                end_row();
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (in_quotes) throw SurveyError("malformed CSV: unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SurveyError("cannot open dataset file '" + path.string() + "'");
    return load_dataset(in, schema);
}

Dataset load_dataset(std::istream& in, const DatasetSchema& schema) {
    for (const auto& q : schema.questions) q.validate();
    auto rows = parse_csv(in);
    if (rows.empty()) throw SurveyError("malformed dataset: missing header row");

    std::unordered_map<std::string, std::size_t> column_index;
    for (std::size_t i = 0; i < rows[0].size(); ++i) column_index[trim(rows[0][i])] = i;
    auto require_column = [&](const std::string& name) {
        auto it = column_index.find(name);
        if (it == column_index.end())
            throw SurveyError("schema/column mismatch: column '" + name + "' not in dataset header");
        return it->second;
    };

    const std::size_t id_col = require_column(schema.id_column);
    std::vector<std::pair<const AttributeSpec*, std::size_t>> attribute_cols;
    for (const auto& a : schema.attributes)
        attribute_cols.emplace_back(&a, require_column(a.column.empty() ? a.name : a.column));
    std::vector<std::pair<const SurveyQuestion*, std::size_t>> truth_cols;
    for (const auto& q : schema.questions) {
        auto it = schema.truth_columns.find(q.id);
        if (it == schema.truth_columns.end())
            throw SurveyError("schema declares no ground-truth column for question '" + q.id + "'");
        truth_cols.emplace_back(&q, require_column(it->second));
    }

    Dataset dataset{schema, {}};
    std::set<std::string> seen;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != rows[0].size())
            throw SurveyError("malformed dataset: row " + std::to_string(r + 1) + " has " +
                              std::to_string(row.size()) + " fields, header has " +
                              std::to_string(rows[0].size()));
        Respondent respondent;
        respondent.id = trim(row[id_col]);
        if (respondent.id.empty())
            throw SurveyError("malformed dataset: row " + std::to_string(r + 1) + " has no respondent id");
        if (!seen.insert(respondent.id).second)
            throw SurveyError("duplicate respondent id '" + respondent.id + "'");
        for (const auto& [spec, col] : attribute_cols) {
            auto value = trim(row[col]);
            if (!value.empty()) respondent.attributes.emplace(spec->name, std::move(value));
        }
        for (const auto& [question, col] : truth_cols) {
            auto value = trim(row[col]);
            if (!value.empty()) respondent.ground_truth.emplace(question->id, resolve_truth(*question, value));
        }
        if (respondent.ground_truth.empty()) continue;
        dataset.respondents.push_back(std::move(respondent));
    }
    return dataset;
}

std::vector<const Respondent*> respondents_for(const Dataset& dataset, const std::string& question_id) {
    std::vector<const Respondent*> out;
    for (const auto& r : dataset.respondents)
        if (r.truth(question_id)) out.push_back(&r);
    return out;
}

}  // namespace surveysim::survey
