#pragma once

#include <string>
#include <vector>

namespace lapsparse::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kVerificationFailed = 3,
};

/// Runs the command line `args` (without the program name) and returns the
/// process exit code. Diagnostics go to stderr, results to stdout or files.
int run(const std::vector<std::string>& args);

}  // namespace lapsparse::cli
