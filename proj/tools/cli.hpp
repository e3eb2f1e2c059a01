#pragma once

#include <iosfwd>

namespace qmeas::cli {

// sysexits-style status codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitBadInteraction = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitGrid = 73;
inline constexpr int kExitIo = 74;

/// Parses argv (argv[0] is the program name) and runs one subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qmeas::cli
