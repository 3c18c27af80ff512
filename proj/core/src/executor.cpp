#include "solscan/executor.hpp"

#include <atomic>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <stdexcept>
#include <thread>

#include "solscan/checksum.hpp"
#include "solscan/error.hpp"
#include "solscan/parser.hpp"
#include "solscan/pragma.hpp"
#include "solscan/report_io.hpp"
#include "solscan/rules.hpp"

namespace solscan::exec {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::system_clock;

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return {};
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string iso_utc(Clock::time_point when) {
    const std::time_t t = Clock::to_time_t(when);
    std::tm tm{};
    ::gmtime_r(&t, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%S", &tm);
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(when.time_since_epoch()).count() % 1000;
    char frac[8];
    std::snprintf(frac, sizeof frac, ".%03lldZ", static_cast<long long>(ms));
    return std::string(buffer) + frac;
}

RawResult run_builtin(const AnalysisTask& task) {
    RawResult raw;
    raw.tool_id = task.tool.id;
    raw.contract_path = task.contract_path.generic_string();
    raw.started_at = Clock::now();
    try {
        const auto file = ir::SourceFile(raw.contract_path, read_bytes(task.contract_path));
        const auto tree = ir::parse_source(file);
        const auto ruleset =
            *task.tool.builtin == registry::BuiltinRuleset::Base ? rules::base_ruleset() : rules::extended_ruleset();
        raw.stdout_text = normalize::findings_to_json(rules::run_rules(tree, file, ruleset), raw.contract_path);
        raw.exit_code = 0;
    } catch (const ParseError& e) {
        raw.stderr_text = raw.contract_path + ":" + e.what() + "\n";
        raw.exit_code = 1;
    }
    raw.finished_at = Clock::now();
    return raw;
}

/// Appends timestamped lines to one log file; safe to share between workers.
class BatchLog {
public:
    explicit BatchLog(const fs::path& file) {
        fs::create_directories(file.parent_path());
        out_.open(file, std::ios::app);
    }

    void write(const std::string& line) {
        const std::time_t t = Clock::to_time_t(Clock::now());
        std::tm tm{};
        ::localtime_r(&t, &tm);
        char stamp[16];
        std::strftime(stamp, sizeof stamp, "%H:%M:%S", &tm);
        std::lock_guard lock(mutex_);
        out_ << '[' << stamp << "] " << line << '\n';
        out_.flush();
    }

private:
    std::mutex mutex_;
    std::ofstream out_;
};

std::string describe_status(const RawResult& raw) {
    if (raw.timed_out) {
        return "timeout";
    }
    return raw.exit_code ? "exit " + std::to_string(*raw.exit_code) : "killed";
}

}  // namespace

AnalysisTask make_task(const registry::ToolDescriptor& tool, const fs::path& contract,
                       std::chrono::milliseconds timeout) {
    AnalysisTask task{tool, contract, {}, timeout};
    if (!tool.builtin) {
        const auto file = ir::SourceFile(contract, read_bytes(contract));
        task.image = registry::select_image(tool, ir::extract_pragma(file));
    }
    return task;
}

RawResult run_task(const AnalysisTask& task, ContainerRuntime& runtime) {
    if (!fs::is_regular_file(task.contract_path)) {
        throw MissingPath("contract not found: " + task.contract_path.string());
    }
    if (task.tool.builtin) {
        return run_builtin(task);
    }
    ContainerRequest request;
    request.image = task.image;
    request.contract_host_path = task.contract_path;
    request.contract_mount_path = std::string(kContractMountDir) + "/" + task.contract_path.filename().string();
    request.args = expand_command(task.tool.command, request.contract_mount_path);
    request.output_file = task.tool.output_file;
    request.timeout = task.timeout;

    RawResult raw;
    raw.tool_id = task.tool.id;
    raw.contract_path = task.contract_path.generic_string();
    raw.started_at = Clock::now();
    ContainerResult result = runtime.run(request);
    raw.finished_at = Clock::now();
    raw.exit_code = result.timed_out ? std::nullopt : result.exit_code;
    raw.timed_out = result.timed_out;
    raw.stdout_text = std::move(result.stdout_text);
    raw.stderr_text = std::move(result.stderr_text);
    if (task.tool.output_file) {
        raw.harvested_files = std::move(result.harvested_files);
    }
    return raw;
}

std::string run_stamp(Clock::time_point when) {
    const std::time_t t = Clock::to_time_t(when);
    std::tm tm{};
    ::localtime_r(&t, &tm);
    char buffer[16];
    std::strftime(buffer, sizeof buffer, "%Y%m%d_%H%M", &tm);
    return buffer;
}

fs::path result_dir(const fs::path& out_dir, std::string_view tool_id, std::string_view stamp,
                    const fs::path& contract_path) {
    return out_dir / std::string(tool_id) / std::string(stamp) / contract_path.stem() / "";
}

ResultIndex ResultIndex::scan(const fs::path& out_dir) {
    ResultIndex index;
    std::error_code ec;
    if (!fs::is_directory(out_dir, ec)) {
        return index;
    }
    // <out>/<tool>/<stamp>/<contract>/ ; stamps iterate in sorted order so the newest wins.
    std::set<fs::path> dirs;
    for (const auto& tool : fs::directory_iterator(out_dir, ec)) {
        if (!tool.is_directory()) {
            continue;
        }
        for (const auto& stamp : fs::directory_iterator(tool.path(), ec)) {
            if (!stamp.is_directory()) {
                continue;
            }
            for (const auto& contract : fs::directory_iterator(stamp.path(), ec)) {
                if (contract.is_directory() && fs::is_regular_file(contract.path() / normalize::kReportFile)) {
                    dirs.insert(contract.path());
                }
            }
        }
    }
    for (const auto& dir : dirs) {
        try {
            const auto meta = normalize::read_run_metadata(dir);
            if (meta && !meta->contract_md5.empty()) {
                const auto tool_id = dir.parent_path().parent_path().filename().string();
                index.entries_.insert_or_assign({tool_id, meta->contract_md5}, dir);
            }
        } catch (const std::exception&) {
            // Unreadable metadata: treat as incomplete.
        }
    }
    return index;
}

std::optional<fs::path> ResultIndex::find(std::string_view tool_id, std::string_view contract_md5) const {
    const auto it = entries_.find({std::string(tool_id), std::string(contract_md5)});
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

bool has_result(const fs::path& out_dir, std::string_view tool_id, const fs::path& contract_path) {
    if (!fs::is_regular_file(contract_path)) {
        return false;
    }
    return ResultIndex::scan(out_dir).find(tool_id, md5_hex(read_bytes(contract_path))).has_value();
}

BatchSummary run_batch(const std::vector<registry::ToolDescriptor>& tools, const std::vector<fs::path>& contracts,
                       const BatchOptions& options, ContainerRuntime& runtime,
                       const normalize::TaxonomyMap& taxonomy) {
    if (options.processes == 0) {
        throw std::invalid_argument("processes must be at least 1");
    }
    const auto started = std::chrono::steady_clock::now();
    BatchSummary summary;
    summary.stamp = options.stamp.value_or(run_stamp());
    summary.log_file = options.log_dir / (summary.stamp + ".log");
    BatchLog log(summary.log_file);

    // Per-contract directory names and checksums, fixed before any work starts.
    std::vector<std::string> dir_names;
    std::vector<std::string> checksums;
    std::map<std::string, int> stem_uses;
    for (const auto& contract : contracts) {
        const auto stem = contract.stem().string();
        const int use = ++stem_uses[stem];
        dir_names.push_back(use == 1 ? stem : stem + "-" + std::to_string(use));
        checksums.push_back(fs::is_regular_file(contract) ? md5_hex(read_bytes(contract)) : std::string{});
    }
    const ResultIndex existing =
        options.skip_existing ? ResultIndex::scan(options.out_dir) : ResultIndex{};

    const std::size_t total = tools.size() * contracts.size();
    summary.outcomes.resize(total);
    log.write("batch " + summary.stamp + ": " + std::to_string(tools.size()) + " tool(s) x " +
              std::to_string(contracts.size()) + " contract(s), " + std::to_string(options.processes) +
              " process(es)");

    std::atomic<std::size_t> next{0};
    std::atomic<bool> abort{false};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < total && !abort; i = next.fetch_add(1)) {
            const auto& tool = tools[i / contracts.size()];
            const std::size_t c = i % contracts.size();
            const auto& contract = contracts[c];
            TaskOutcome& outcome = summary.outcomes[i];
            outcome.tool_id = tool.id;
            outcome.contract_path = contract.generic_string();
            try {
                if (options.skip_existing && !checksums[c].empty()) {
                    if (auto dir = existing.find(tool.id, checksums[c])) {
                        outcome.status = TaskOutcome::Status::Skipped;
                        outcome.dir = *dir;
                        try {
                            outcome.report = normalize::read_report(*dir);
                        } catch (const std::exception&) {
                        }
                        log.write("skip " + tool.id + " " + outcome.contract_path);
                        continue;
                    }
                }
                RawResult raw;
                try {
                    raw = run_task(make_task(tool, contract, options.timeout), runtime);
                } catch (const std::exception& e) {
                    outcome.status = TaskOutcome::Status::Failed;
                    outcome.error = e.what();
                    log.write("fail " + tool.id + " " + outcome.contract_path + ": " + e.what());
                    continue;
                }
                auto report = normalize::parse_tool_output(tool, raw, taxonomy);
                normalize::RunMetadata meta{checksums[c],
                                            summary.stamp,
                                            raw.exit_code,
                                            raw.timed_out,
                                            iso_utc(raw.started_at),
                                            iso_utc(raw.finished_at),
                                            raw.stderr_text};
                outcome.dir = options.out_dir / tool.id / summary.stamp / dir_names[c];
                fs::create_directories(outcome.dir);
                normalize::write_report(report, normalize::raw_output(tool, raw), meta, outcome.dir);
                outcome.status = TaskOutcome::Status::Executed;
                log.write("done " + tool.id + " " + outcome.contract_path + " (" + describe_status(raw) + ", " +
                          std::to_string(report.findings.size()) + " finding(s), " +
                          std::to_string(raw.duration_seconds()) + "s)");
                outcome.report = std::move(report);
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) {
                    fatal = std::current_exception();
                }
                abort = true;
            }
        }
    };

    {
        std::vector<std::jthread> workers;
        const auto count = std::min<std::size_t>(options.processes, std::max<std::size_t>(total, 1));
        for (std::size_t w = 0; w < count; ++w) {
            workers.emplace_back(work);
        }
    }
    if (fatal) {
        log.write("batch aborted");
        std::rethrow_exception(fatal);
    }

    for (const auto& outcome : summary.outcomes) {
        switch (outcome.status) {
            case TaskOutcome::Status::Executed:
                ++summary.executed;
                if (outcome.report && !outcome.report->success) {
                    ++summary.unsuccessful;
                }
                break;
            case TaskOutcome::Status::Skipped: ++summary.skipped; break;
            case TaskOutcome::Status::Failed: ++summary.failed; break;
        }
    }
    summary.duration = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log.write("batch " + summary.stamp + " finished: executed=" + std::to_string(summary.executed) +
              " skipped=" + std::to_string(summary.skipped) + " failed=" + std::to_string(summary.failed) +
              " unsuccessful=" + std::to_string(summary.unsuccessful));
    return summary;
}

}  // namespace solscan::exec
