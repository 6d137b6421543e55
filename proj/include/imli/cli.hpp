#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace imli::cli {

enum ExitCode : int {
  ok = 0,
  usage_error = 1,
  data_error = 2,
  solver_error = 3,
  timeout_error = 4,
};

// args excludes the program name.  Results go to `out`, diagnostics to `err`.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace imli::cli
