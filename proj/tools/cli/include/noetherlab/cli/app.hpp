#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace noetherlab::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitCheckFailed = 1,
  kExitInvalid = 2,
  kExitNumericFault = 3,
};

/// Entry point behind the `noetherlab` executable. `args` excludes argv[0].
int run_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace noetherlab::cli
