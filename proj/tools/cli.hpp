#pragma once

#include <iosfwd>

namespace scc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Entry point for `scc train | encode | bench`. Diagnostics and per-epoch
// progress go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scc::cli
