#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "surveysim/backend/backend.hpp"
#include "surveysim/harness/config.hpp"
#include "surveysim/harness/spec.hpp"
#include "surveysim/harness/store.hpp"
#include "surveysim/methods/run_method.hpp"
#include "surveysim/survey/types.hpp"

namespace surveysim::harness {

// Everything a run needs besides the grid.
struct RunContext {
    const RunConfig* config = nullptr;
    const std::vector<survey::Dataset>* datasets = nullptr;
    std::map<std::string, std::shared_ptr<backend::Backend>> backends;  // by profile name
};

struct ExecuteOptions {
    int max_in_flight = 8;
    std::function<void(const methods::RunRecord&)> on_record;  // called after each append
    std::stop_token stop;  // checked before each task is taken
};

struct RunSummary {
    std::size_t cells = 0;
    std::size_t tasks = 0;      // cells x respondents with ground truth
    std::size_t completed = 0;  // records written by this run
    std::size_t failed = 0;     // of those, records that ended in a backend error
    std::size_t skipped = 0;    // already in the store
    std::size_t open_generations = 0;
    bool interrupted = false;
};

// Runs every (cell, respondent) pair missing from the store. Backend errors
// are recorded per respondent; a store failure stops the run and rethrows.
RunSummary execute(const std::vector<SimulationSpec>& grid, const RunContext& context, RecordStore& store,
                   const ExecuteOptions& options);

}  // namespace surveysim::harness
