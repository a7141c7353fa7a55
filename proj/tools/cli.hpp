#pragma once

#include <iosfwd>

namespace bido::cli {

enum ExitCode : int {
  kOk = 0,
  kCeremonyFailure = 1,
  kUsage = 2,
  kInputError = 3,
  kTransportFailure = 4,
};

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bido::cli
