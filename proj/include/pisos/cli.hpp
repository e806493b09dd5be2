#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pisos {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitNumericalFailure = 4;

// Runs the command line `args` (without the program name). Reports go to
// `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pisos
