#ifndef GROWTHDYN_RUN_HPP_
#define GROWTHDYN_RUN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "growthdyn/panel.hpp"

namespace growthdyn {

// Batch run configuration. Loaded from a key-value file, overridable by
// command-line flags.
struct RunConfig {
    std::string emissions_path;
    std::string gdp_path;
    std::optional<std::pair<int, int>> year_range;
    std::vector<PeriodDefinition> periods;  // empty: canonical set clipped to data
    int window_length = 5;
    std::size_t n_bins = 20;
    int bootstrap_replicates = 500;
    int window_bootstrap_replicates = 200;
    int aep_bootstrap_replicates = 200;  // fallback SEs in distribution fits
    std::optional<std::uint64_t> seed;  // required, all stochastic steps derive from it
    std::string out_dir;
    // Period names for the per-region average-growth comparison table.
    std::string average_period_a = "pre-ETS";
    std::string average_period_b = "ETS-3";
};

// Parses "name:start-end[,name:start-end...]".
std::vector<PeriodDefinition> parse_periods_spec(const std::string& spec);

// Reads "key = value" lines ('#' comments allowed). Unknown keys are
// rejected.
RunConfig load_config_file(const std::string& path);

struct RunReport {
    bool all_converged = true;
    std::vector<std::string> failures;  // estimation failures, human-readable
    std::vector<std::string> outputs;   // file names written under out_dir
};

// Executes the full pipeline: ingest, panel construction, per-period AEP /
// convergence / scaling estimation, moving windows, report files. All
// outputs are deterministic given the seed; files appear atomically. The
// output directory is locked for the duration of the run.
RunReport run(const RunConfig& config);

}  // namespace growthdyn

#endif  // GROWTHDYN_RUN_HPP_
