#pragma once

#include <condition_variable>
#include <deque>
#include <functional>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "solscan/container_runtime.hpp"
#include "solscan/dataset.hpp"
#include "solscan/error.hpp"
#include "solscan/normalizer.hpp"
#include "solscan/tool_registry.hpp"

namespace solscan::api {

enum class RunStatus { Queued, Running, Done, Failed };

[[nodiscard]] std::string_view to_string(RunStatus status) noexcept;

struct RunRecord {
    std::string id;
    RunStatus status = RunStatus::Queued;
    /// File name of a pasted or uploaded contract.
    std::optional<std::string> source_name;
    std::optional<std::string> dataset;
    std::vector<std::string> tool_ids;
    /// Filled when Done, tool-major.
    std::vector<normalize::NormalizedReport> reports;
    std::string error;
};

/// `{id, status, tools, source|dataset, error?, results: [{tool, issues, categories: [{category, count,
/// findings}]}], reports: [...]}`
[[nodiscard]] std::string run_to_json(const RunRecord& run);

/// Rejected submissions; `status` is the HTTP status to answer with.
class RequestError : public Error {
public:
    RequestError(int status, const std::string& message) : Error(message), status_(status) {}
    [[nodiscard]] int status() const noexcept { return status_; }

private:
    int status_;
};

struct ServiceConfig {
    /// Holds tools/ and dataset/dataset.yaml.
    std::filesystem::path config_dir = "config";
    /// Scratch space for submitted sources and per-run results.
    std::filesystem::path work_dir;
    /// When set, every run is saved as `<persist_dir>/<id>.json` and reloaded at start.
    std::optional<std::filesystem::path> persist_dir;
    std::shared_ptr<exec::ContainerRuntime> runtime;
    unsigned processes = 1;
    std::chrono::milliseconds timeout{std::chrono::seconds(1800)};
};

/// Run store plus a dispatcher thread that executes queued runs one at a time
/// through run_batch.
class AnalysisService {
public:
    explicit AnalysisService(ServiceConfig config);
    ~AnalysisService();
    AnalysisService(const AnalysisService&) = delete;
    AnalysisService& operator=(const AnalysisService&) = delete;

    /// Throws RequestError(400) for empty sources or unknown tools.
    std::string submit_source(std::string source, std::string file_name, std::vector<std::string> tool_ids);
    /// Only datasets named in the configuration are accepted.
    std::string submit_dataset(const std::string& name, std::vector<std::string> tool_ids);

    [[nodiscard]] std::optional<RunRecord> get(const std::string& id) const;
    [[nodiscard]] const registry::ToolRegistry& registry() const noexcept { return registry_; }
    [[nodiscard]] std::vector<std::string> dataset_names() const;
    /// Blocks until the queue is empty and nothing is running.
    void wait_idle();

private:
    void validate_tools(const std::vector<std::string>& tool_ids) const;
    /// `prepare` runs with the fresh id before the run becomes visible.
    std::string enqueue(RunRecord record, const std::function<void(const std::string&)>& prepare = {});
    void dispatch(std::stop_token stop);
    void execute(const std::string& id);
    void update(const std::string& id, const std::function<void(RunRecord&)>& change);
    void persist(const RunRecord& run) const;
    std::string new_id();

    ServiceConfig config_;
    registry::ToolRegistry registry_;
    normalize::TaxonomyMap taxonomy_;
    std::vector<dataset::NamedDataset> datasets_;
    std::filesystem::path dataset_base_;

    mutable std::mutex mutex_;
    std::condition_variable_any wake_;
    std::condition_variable idle_;
    std::map<std::string, RunRecord> runs_;
    std::deque<std::string> queue_;
    bool busy_ = false;
    std::jthread dispatcher_;
};

/// HTTP facade: POST /analyze, GET /runs/{id}, GET /tools, GET /datasets.
class ApiServer {
public:
    static constexpr std::size_t kMaxBody = 1 << 20;

    explicit ApiServer(AnalysisService& service, std::string cors_origin = "*");
    ~ApiServer();
    ApiServer(const ApiServer&) = delete;
    ApiServer& operator=(const ApiServer&) = delete;

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace solscan::api
