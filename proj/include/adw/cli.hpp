#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace adw::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

/// Runs the command line `args` (program name excluded). Flags may also be
/// set through ADW_* environment variables; flags win.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace adw::cli
