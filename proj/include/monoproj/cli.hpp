#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace monoproj {

/// Exit codes of the command-line tool.
enum ExitCode : int { exit_ok = 0, exit_internal = 1, exit_validation = 2, exit_numerical = 3 };

/// Runs `monoproj <subcommand> [flags]`. `args` excludes the program name.
/// Data files written to stdout go to `out`; messages and logs go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoproj
