#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace carnot::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { ok = 0, violation = 1, usage_error = 2 };

/// Runs one command line (without the program name). The report goes to
/// `out`; usage text and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace carnot::cli
