#ifndef SMIA_CLI_HPP_
#define SMIA_CLI_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace smia::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitAuditFailure = 2;

/// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace smia::cli

#endif  // SMIA_CLI_HPP_
