#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bellcompat {

inline constexpr const char* kToolName = "bellcompat";
inline constexpr const char* kToolVersion = "1.0.0";

/// Exit codes of run_command.
enum ExitCode : int {
  kExitOk = 0,
  kExitFinding = 1,  // analysis finding with --fail-on-finding
  kExitInput = 2,    // bad arguments, unreadable or invalid input
};

/// Runs one subcommand (check, quasi, predict, simulate, analyze, legget,
/// cross). The JSON report goes to --out when given, otherwise to `out`;
/// with --out the text summary is written to `out` instead. Diagnostics go
/// to `err`. args[0] is the program name.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bellcompat
