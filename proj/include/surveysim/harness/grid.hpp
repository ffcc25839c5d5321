#pragma once

#include <vector>

#include "surveysim/harness/config.hpp"
#include "surveysim/harness/spec.hpp"

namespace surveysim::harness {

// True when the exclusion covers the cell.
bool excluded_by(const Exclusion& exclusion, const SimulationSpec& spec);

// Cross product of datasets' questions x models x methods x variants x
// decoding levels, minus exclusions. Enumeration order follows that nesting
// and the declaration order of each factor.
std::vector<SimulationSpec> expand_grid(const RunConfig& config);

}  // namespace surveysim::harness
