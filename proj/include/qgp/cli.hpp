#pragma once

#include <iosfwd>

namespace qgp {

enum ExitCode { kExitOk = 0, kExitVerification = 1, kExitInput = 2, kExitResource = 3, kExitSolver = 4 };

// entry point of the qgp tool; reports go to `out` (or --output), diagnostics to `err`
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qgp
