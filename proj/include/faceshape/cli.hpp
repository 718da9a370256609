#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faceshape {

/// Runs one CLI invocation. `args` excludes the program name.
/// Exit codes: 0 success, 1 usage/validation/parse error, 2 runtime or numerical error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace faceshape
