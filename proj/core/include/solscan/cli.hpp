#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace solscan::cli {

enum class Mode { Analyze, Info, List, Help };
enum class ListTarget { Tools, Datasets };

struct CliInvocation {
    Mode mode = Mode::Help;
    std::vector<std::string> files;
    std::vector<std::string> dataset_names;
    std::vector<std::string> tool_ids;
    /// Ids given to --info.
    std::vector<std::string> info_tools;
    bool skip_existing = false;
    unsigned processes = 1;
    std::optional<ListTarget> list_target;

    std::filesystem::path config_dir = "config";
    std::filesystem::path results_dir = "results";
    std::filesystem::path log_dir = "logs";
    /// "docker" or "process".
    std::string runtime = "docker";
    /// Image -> executable map used by the process runtime.
    std::optional<std::filesystem::path> stub_map;
    unsigned timeout_seconds = 1800;
    /// Corpus directory whose vulnerabilities.json scores the run.
    std::optional<std::filesystem::path> annotations;
};

[[nodiscard]] std::string synopsis();

/// `argv[0]` is the program name. Throws UsageError (message followed by
/// the synopsis) for unknown flags, --file together with --dataset, or an
/// invocation that selects no mode.
[[nodiscard]] CliInvocation parse_args(const std::vector<std::string>& argv);

/// 0 when every task completed, 1 on infrastructure failures, 2 on usage
/// errors such as unknown tools or datasets.
int execute(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_args + execute; usage errors print the synopsis and return 2.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace solscan::cli
