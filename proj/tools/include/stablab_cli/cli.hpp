#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stablab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "STABLAB_OUTPUT_DIR";

/// Runs one invocation; args exclude the program name. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stablab::cli
