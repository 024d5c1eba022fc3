#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace prodgraph::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;      // I/O or validation failure
inline constexpr int kExitInconsistent = 2;  // internal consistency failure

// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace prodgraph::cli
