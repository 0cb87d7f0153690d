#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fpwalk::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kInvalidConfig = 2,
  kPrecondition = 3,
  kUnknownCase = 4,
};

/// Runs one invocation. `args` excludes the program name. The JSON report
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// FNV-1a 64 of the canonical walk string, as 16 hex digits.
std::string walk_digest(const std::string& canonical);

}  // namespace fpwalk::cli
