#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hillgap {

/// Runs the command line (without the program name).  Returns 0 on success,
/// 1 on argument errors and 2 on computation errors; failures also write a
/// JSON error object to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hillgap
