#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace symentropy::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadFlags = 2,
  kParseError = 3,
  kEmptyInput = 4,
  kDiagnosticExceeded = 5,
};

/// Runs one command line (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace symentropy::cli
