#pragma once

#include <iosfwd>

namespace exlat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. Data goes to `out` (or files named by --out),
/// diagnostics to `err`. Returns 0 on success, 1 when the computation could
/// not produce a result, 2 on bad usage.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exlat::cli
