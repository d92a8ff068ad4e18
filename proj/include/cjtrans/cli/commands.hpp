#pragma once

#include "cjtrans/cli/config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cjtrans::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Entry point of the `cjtrans` tool. `args` excludes the program name.
/// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const EnvLookup& env = process_env());

} // namespace cjtrans::cli
