#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace entvec {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,  // I/O, parse, failed verification
  kExitUsage = 2,
  kExitUndefinedDistance = 3,
};

// argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace entvec
