#pragma once

#include <iosfwd>

namespace specspan {

/// Entry point of the specspan command; returns the process exit code.
///   0 success, 1 other errors, 2 bad flags, 3 generation failure or guard
///   breach, 4 verification failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specspan
