#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trapnoise::cli {

inline constexpr const char* tool_version = "0.1.0";
inline constexpr const char* report_schema_version = "1.0.0";

enum ExitCode : int { ok = 0, config_error = 2, data_error = 3, numerical_error = 4 };

// Runs the command line `args` (without the program name). Output files go
// where --out points; without --out the result is written to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trapnoise::cli
