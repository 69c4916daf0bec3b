#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adasharp {

/// Finds an executable the way the harness does: names containing '/' are
/// used as-is; bare names are searched in ADASHARP_ENCODER_PATH first, then
/// PATH. Returns nullopt when nothing executable is found.
std::optional<std::filesystem::path> resolve_executable(const std::string& name);

struct ProcessResult {
    int exit_code = 0;       ///< 128 + signal number when killed by a signal.
    std::string stderr_text; ///< Contents of the stderr log.
};

/// Spawns argv (argv[0] already resolved) without a shell, stdin and stdout
/// bound to /dev/null and stderr captured into stderr_log. Blocks until exit.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const std::filesystem::path& stderr_log);

}  // namespace adasharp
