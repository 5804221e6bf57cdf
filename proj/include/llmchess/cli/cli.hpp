#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace llmchess::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Runs the llmchess command line. `args` excludes the program name.
/// Returns 0 on success, 1 for usage or configuration errors, 2 when the
/// experiment itself fails (I/O, engine, audit mismatches).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace llmchess::cli
