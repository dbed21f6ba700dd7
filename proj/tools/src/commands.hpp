#pragma once

#include "run_config.hpp"

#include <iosfwd>

namespace oseen::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSolver = 3,
    kExitProperty = 4,
};

/// Runs the configured experiment, writing outputs and run.log under
/// config.out. Progress lines go to `console`. Returns an ExitCode.
int run_experiment(const RunConfig& config, std::ostream& console);

int cmd_kovasznay(const RunConfig& config, std::ostream& console);
int cmd_bent_random(const RunConfig& config, std::ostream& console);
int cmd_ns_recovery(const RunConfig& config, std::ostream& console);
int cmd_check(const RunConfig& config, std::ostream& console);

} // namespace oseen::cli
