#pragma once

#include <iosfwd>

namespace oeecast {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitInvalidArgument = 4,
  kExitNumerical = 5,
  kExitNotFound = 6,
};

/// Runs one command line (argv[0] is the program name).
int cli_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace oeecast
