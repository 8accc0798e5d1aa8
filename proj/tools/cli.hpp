#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nmrsearch::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kAmbiguous = 2,
  kFixtureFailure = 3,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nmrsearch::cli
