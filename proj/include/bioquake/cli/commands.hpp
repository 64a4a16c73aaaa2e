#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bioquake::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Runs one invocation; `args` excludes the program name. Results go to
/// `out`, diagnostics and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bioquake::cli
