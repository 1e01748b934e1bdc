#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grabforest::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCriterionFailed = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the grabforest tool. Artifacts go to --out (or `out` when
// absent); diagnostics and summaries go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grabforest::cli
