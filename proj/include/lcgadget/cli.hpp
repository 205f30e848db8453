#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lcg {

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name: {"verify-complete", "--seed", "1", ...}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lcg
