#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>

namespace solscan::exec {

/// Captured output of one (tool, contract) execution.
struct RawResult {
    using Clock = std::chrono::system_clock;

    std::string tool_id;
    std::string contract_path;
    /// Absent when the task timed out or was killed by a signal.
    std::optional<int> exit_code;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
    /// In-container path -> bytes; only filled for tools that declare an output file.
    std::map<std::string, std::string> harvested_files;
    Clock::time_point started_at{};
    Clock::time_point finished_at{};

    [[nodiscard]] double duration_seconds() const {
        return std::chrono::duration<double>(finished_at - started_at).count();
    }
    [[nodiscard]] bool abnormal() const noexcept { return timed_out || exit_code.value_or(-1) != 0; }
};

}  // namespace solscan::exec
