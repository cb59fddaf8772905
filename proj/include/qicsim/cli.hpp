#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace qicsim {

/// Runs one command line (without the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`. Returns the process
/// exit code: 0 on success, 1 for failed checks or numeric errors, 2 for
/// usage and configuration errors.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qicsim
