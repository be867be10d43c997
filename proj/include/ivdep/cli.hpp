#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ivdep::cli {

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { success = 0, domain_error = 1, usage_error = 2 };

/// Runs one command. `args` excludes the program name. JSON results go to
/// `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ivdep::cli
