#pragma once

#include <iosfwd>

namespace qsg {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResourceCap = 3;
inline constexpr int kExitMalformed = 4;

// Subcommands: enumerate, sample, minfind, costmodel, quadform.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qsg
