#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace divplan {

/// Command dispatch behind the divplan binary. `args` excludes the program
/// name. Returns the process exit code: 0 success, 2 domain or validation
/// error, 3 I/O error.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace divplan
