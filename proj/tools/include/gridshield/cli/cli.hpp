#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gridshield::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kSolverError = 2,
  kGuardRefusal = 3,
};

/// Runs one command line (args[0] is the program name). Reports and
/// diagnostics go to `out` / `err` unless an output file is given.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1..5", "0,2,4" or a mix such as "0,2..4".
std::vector<int> parse_budgets(const std::string& text);

}  // namespace gridshield::cli
