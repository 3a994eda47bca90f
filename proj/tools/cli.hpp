#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tileopt::cli {

/// Runs one command line (args excludes the program name). Reports go to
/// `out`, diagnostics to `err` as "error[<kind>]: <message>".
/// Returns 0 on success, 1 for bad input, 2 for an internal inconsistency.
auto run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
  -> int;

} // namespace tileopt::cli
