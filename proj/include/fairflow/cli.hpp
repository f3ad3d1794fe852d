#pragma once

#include <ostream>

namespace fairflow::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kData = 2,
  kNotConverged = 3,
};

/// Runs one command. Results go to --out (or `out` when absent), diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fairflow::cli
