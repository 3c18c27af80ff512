#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "solscan/normalizer.hpp"

namespace solscan::normalize {

inline constexpr std::string_view kReportFile = "result.json";
inline constexpr std::string_view kRawFile = "output.raw";
/// Run metadata (duration, timestamps, exit status, contract checksum). Kept
/// apart from result.json so that the latter depends only on the analysis.
inline constexpr std::string_view kRunFile = "run.json";

/// Per-finding JSON shared by result.json and the built-in tool's stdout.
/// `contract_path` is written as "file" only when it differs from `default_contract`.
[[nodiscard]] std::string findings_to_json(const std::vector<Finding>& findings, std::string_view default_contract = {});
/// Throws std::invalid_argument on malformed input.
[[nodiscard]] std::vector<Finding> findings_from_json(std::string_view text, std::string_view default_contract = {});

/// result.json body (no duration).
[[nodiscard]] std::string report_to_json(const NormalizedReport& report);
/// Throws std::invalid_argument on malformed input; duration is left 0.
[[nodiscard]] NormalizedReport report_from_json(std::string_view text);

struct RunMetadata {
    std::string contract_md5;
    std::string stamp;
    std::optional<int> exit_code;
    bool timed_out = false;
    std::string started_at;
    std::string finished_at;
    std::string stderr_text;
};

/// Writes result.json, output.raw and run.json into `dir` (created when
/// missing), each atomically
/// (temporary file + rename). result.json goes last so that its presence
/// marks a completed run. Filesystem errors propagate.
void write_report(const NormalizedReport& report, std::string_view raw_output, const RunMetadata& meta,
                  const std::filesystem::path& dir);

/// Reads result.json and, when present, the duration from run.json.
[[nodiscard]] NormalizedReport read_report(const std::filesystem::path& dir);
[[nodiscard]] std::optional<RunMetadata> read_run_metadata(const std::filesystem::path& dir);

/// Writes `bytes` to `path` through a sibling temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace solscan::normalize
