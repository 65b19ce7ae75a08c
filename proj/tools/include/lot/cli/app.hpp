#pragma once

#include <ostream>

namespace lot::cli {

/// Parses the command line, runs one command and returns the process exit
/// code: 0 success, 2 input error, 3 convergence failure, 4 unsupported.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lot::cli
