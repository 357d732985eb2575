#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rfid::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitUsage = 2;

/// Runs one command line. Results go to `out` (or the --out file),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rfid::cli
