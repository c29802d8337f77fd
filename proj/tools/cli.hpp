#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gasaug::cli {

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kDataError = 2, kInternalError = 3 };

/// Runs one subcommand. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gasaug::cli
