#pragma once

#include "starbsde/config.hpp"
#include "starbsde/report.hpp"

namespace starbsde {

struct ExperimentOutcome {
    std::vector<ReportRow> rows;
    bool all_pass = true;
};

/// Dispatch one experiment to the named module operation and return report
/// rows (config order preserved in batches). Assertions from the config set
/// the pass flag and tolerance of matching quantities.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool collect_timings = false);

} // namespace starbsde
