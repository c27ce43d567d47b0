// orbitsched command-line front end. `run` is the whole program minus process setup so tests can
// drive it in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace orbitsched::cli {

enum ExitCode { kOk = 0, kUsage = 1, kInfeasible = 2, kSolverError = 3 };

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitsched::cli
