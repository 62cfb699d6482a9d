#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace regimesplit {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInvalidInput = 2, kExitSolverFailure = 3 };

/// Runs the tool on args (without the program name), writing results to out and
/// diagnostics to err. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace regimesplit
