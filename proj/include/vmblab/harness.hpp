#pragma once

#include <iosfwd>
#include <string>

#include "vmblab/config.hpp"

namespace vmblab {

// Executes the scenario and writes manifest.json, CSV series and snapshots under
// config.output_dir. Returns the process exit code: 0 success, 2 invariant
// violation, 3 numerical failure. Config errors propagate as ConfigInvalid.
int run_scenario(const RunConfig& config, std::ostream& log);

// Re-checks the stored snapshots of a run directory. Prints one line per check;
// returns 0 when all hold and 2 otherwise.
int verify_run(const std::string& dir, std::ostream& out);

// Reads convergence.csv of a limit_sweep directory, writes table.csv next to it
// and prints the aligned table.
int emit_table(const std::string& dir, std::ostream& out);

inline constexpr const char* vmblab_version = "0.1.0";

}  // namespace vmblab
