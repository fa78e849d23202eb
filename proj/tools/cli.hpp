#pragma once

#include <iosfwd>

namespace streamdelay::cli {

inline constexpr int exit_ok     = 0;
inline constexpr int exit_usage  = 2;
inline constexpr int exit_domain = 3;

/// Runs one command line. Results go to `out` unless an output file is given; diagnostics go to
/// `err`. Returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace streamdelay::cli
