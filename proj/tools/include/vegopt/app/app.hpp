#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vegopt::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitInternal = 2;

// Parses `args` (without the program name) and runs one command. Progress and
// metrics go to `out`, warnings and errors to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vegopt::app
