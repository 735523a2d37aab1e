#ifndef RELSAMP_TOOLS_CLI_HPP
#define RELSAMP_TOOLS_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace relsamp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;

// args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace relsamp::cli

#endif
