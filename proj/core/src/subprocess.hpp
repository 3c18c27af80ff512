#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace solscan::exec::detail {

struct ProcessOutcome {
    std::optional<int> exit_code;  // absent when killed by a signal
    int signal = 0;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
};

/// Runs argv[0] (searched in PATH) in its own process group, capturing both
/// streams. On timeout the whole group is killed. Exit code 127 means the
/// executable could not be started.
ProcessOutcome run_process(const std::vector<std::string>& argv, std::chrono::milliseconds timeout,
                           const std::filesystem::path& cwd = {});

std::optional<std::filesystem::path> find_in_path(const std::string& name);

}  // namespace solscan::exec::detail
