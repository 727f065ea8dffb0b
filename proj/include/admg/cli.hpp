#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace admg::cli {

enum ExitCode { kSuccess = 0, kUsageError = 1, kNumericError = 2 };

/// Runs the `admg` command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

}  // namespace admg::cli
