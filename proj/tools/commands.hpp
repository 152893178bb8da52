#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace topola::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Runs one command line (args excludes the program name). Reports and
/// matrices without --output go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topola::cli
