#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ktsim::cli {

// Stable process exit codes.
enum ExitStatus : int {
  kSuccess = 0,
  kInvalidConfig = 1,
  kValidationFailure = 2,
  kIoError = 3,
};

// Entry point shared by the ktsim binary and the tests. `args` excludes the
// program name. Human-readable text goes to `out` unless --quiet; every
// command finishes with one JSON status line on `out`. Diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ktsim::cli
