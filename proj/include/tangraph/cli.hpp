#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tangraph {

// Exit codes of the command line tool.
enum ExitCode : int {
  kExitOk = 0,            // success, or the checked property holds
  kExitFails = 1,         // the property fails (a legitimate negative result)
  kExitInconclusive = 2,  // a component hit a chart boundary, or bisection hit a contradiction
  kExitInvalid = 3,       // invalid input
};

// Runs the tool on `args` (without the program name). Reports go to `out`
// unless an output path is configured; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tangraph
