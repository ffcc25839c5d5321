#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "surveysim/survey/types.hpp"

namespace surveysim::survey {

// RFC 4180 CSV: quoted fields, doubled quotes, CRLF or LF line endings.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// Loads one respondent per row. Rows with no ground truth for any declared
// question are dropped; empty attribute cells are left absent.
Dataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema);
Dataset load_dataset(std::istream& in, const DatasetSchema& schema);

// Respondents that carry ground truth for the question, in file order.
std::vector<const Respondent*> respondents_for(const Dataset& dataset, const std::string& question_id);

}  // namespace surveysim::survey
