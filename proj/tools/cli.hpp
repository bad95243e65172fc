#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nli::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kConvergenceError = 2,
  kStatisticalFailure = 3,
};

/// Entry point of the `nlisim` tool. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nli::cli
