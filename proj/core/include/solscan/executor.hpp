#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solscan/container_runtime.hpp"
#include "solscan/normalizer.hpp"
#include "solscan/raw_result.hpp"
#include "solscan/tool_registry.hpp"

namespace solscan::exec {

inline constexpr std::chrono::seconds kDefaultTimeout{1800};

struct AnalysisTask {
    registry::ToolDescriptor tool;
    std::filesystem::path contract_path;
    /// Resolved through select_image; empty for built-in tools.
    std::string image;
    std::chrono::milliseconds timeout{kDefaultTimeout};
};

/// Reads the contract's pragma and picks the matching image.
[[nodiscard]] AnalysisTask make_task(const registry::ToolDescriptor& tool, const std::filesystem::path& contract,
                                     std::chrono::milliseconds timeout = kDefaultTimeout);

/// Built-in tools run in-process and print their findings as JSON; every other
/// tool goes through `runtime`. Timeouts are reported in the result.
/// Throws RuntimeUnavailable or ImageMissing, and MissingPath when the contract
/// does not exist.
[[nodiscard]] RawResult run_task(const AnalysisTask& task, ContainerRuntime& runtime);

/// `YYYYMMDD_HHMM` in local time.
[[nodiscard]] std::string run_stamp(std::chrono::system_clock::time_point when = std::chrono::system_clock::now());

/// `<out_dir>/<tool_id>/<run_stamp>/<contract stem>/`
[[nodiscard]] std::filesystem::path result_dir(const std::filesystem::path& out_dir, std::string_view tool_id,
                                               std::string_view run_stamp, const std::filesystem::path& contract_path);

/// Completed reports under `out_dir`, keyed by (tool id, contract MD5), from
/// every run stamp. A directory counts only when result.json is present.
class ResultIndex {
public:
    static ResultIndex scan(const std::filesystem::path& out_dir);

    [[nodiscard]] std::optional<std::filesystem::path> find(std::string_view tool_id,
                                                            std::string_view contract_md5) const;

private:
    std::map<std::pair<std::string, std::string>, std::filesystem::path> entries_;
};

/// True when some run stamp holds a completed report for this tool and the
/// contract's current content.
[[nodiscard]] bool has_result(const std::filesystem::path& out_dir, std::string_view tool_id,
                              const std::filesystem::path& contract_path);

struct BatchOptions {
    unsigned processes = 1;
    bool skip_existing = false;
    std::filesystem::path out_dir = "results";
    std::filesystem::path log_dir = "logs";
    /// Defaults to run_stamp() at batch start.
    std::optional<std::string> stamp;
    std::chrono::milliseconds timeout{kDefaultTimeout};
};

struct TaskOutcome {
    enum class Status { Executed, Skipped, Failed };

    std::string tool_id;
    std::string contract_path;
    Status status = Status::Failed;
    /// Where the report lives (an older stamp for skipped pairs).
    std::filesystem::path dir;
    std::optional<normalize::NormalizedReport> report;
    /// Infrastructure error for failed pairs.
    std::string error;
};

struct BatchSummary {
    std::size_t executed = 0;
    std::size_t skipped = 0;
    /// Pairs that produced no report (runtime or image problems).
    std::size_t failed = 0;
    /// Executed pairs whose report has success=false.
    std::size_t unsuccessful = 0;
    double duration = 0.0;
    std::string stamp;
    std::filesystem::path log_file;
    /// Tool-major, in request order.
    std::vector<TaskOutcome> outcomes;
};

/// Runs every (tool, contract) pair at most once on `processes` workers.
/// Contracts sharing a file stem get `-2`, `-3`, ... suffixes in request order.
/// Per-pair failures are recorded; errors writing under out_dir propagate.
/// Throws std::invalid_argument when processes is 0.
BatchSummary run_batch(const std::vector<registry::ToolDescriptor>& tools,
                       const std::vector<std::filesystem::path>& contracts, const BatchOptions& options,
                       ContainerRuntime& runtime, const normalize::TaxonomyMap& taxonomy);

}  // namespace solscan::exec
