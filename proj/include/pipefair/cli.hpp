#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pipefair {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitNotConverged = 3;

// Runs the `pipefair` command line. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pipefair
