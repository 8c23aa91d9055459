#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mrm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;

// args excludes the program name. Normal output goes to `out` unless a
// subcommand writes to --out; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace mrm::cli
