#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace losg {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitConverged = 0,
  kExitError = 1,
  kExitIterationCap = 2,
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
/// Results go to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace losg
