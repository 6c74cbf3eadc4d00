#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cityscan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitUsageError = 2;

/// Runs `cityscan <args...>`; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Applies CITYSCAN_LOG (error|warn|info|debug) to the stderr logger.
void configure_logging();

}  // namespace cityscan::cli
