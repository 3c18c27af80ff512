#include "solscan/api_service.hpp"

#include <algorithm>
#include <array>
#include <iomanip>
#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "solscan/executor.hpp"
#include "solscan/report_io.hpp"

namespace solscan::api {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

constexpr std::array<std::string_view, 4> kStatusNames = {"queued", "running", "done", "failed"};

std::optional<RunStatus> parse_status(std::string_view text) {
    for (std::size_t i = 0; i < kStatusNames.size(); ++i) {
        if (kStatusNames[i] == text) {
            return static_cast<RunStatus>(i);
        }
    }
    return std::nullopt;
}

std::string sanitize_file_name(std::string name) {
    name = fs::path(name).filename().string();
    const bool clean = !name.empty() && name.front() != '.' && std::all_of(name.begin(), name.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
    if (!clean) {
        return "contract.sol";
    }
    return name.ends_with(".sol") ? name : name + ".sol";
}

ojson report_json(const normalize::NormalizedReport& report) {
    auto j = ojson::parse(normalize::report_to_json(report));
    j["duration"] = report.duration;
    return j;
}

RunRecord run_from_json(const ojson& j) {
    RunRecord run;
    run.id = j.at("id").get<std::string>();
    run.status = parse_status(j.at("status").get<std::string>()).value_or(RunStatus::Failed);
    if (j.contains("source")) {
        run.source_name = j.at("source").get<std::string>();
    }
    if (j.contains("dataset")) {
        run.dataset = j.at("dataset").get<std::string>();
    }
    run.tool_ids = j.at("tools").get<std::vector<std::string>>();
    run.error = j.value("error", std::string{});
    for (const auto& r : j.value("reports", ojson::array())) {
        auto report = normalize::report_from_json(r.dump());
        report.duration = r.value("duration", 0.0);
        run.reports.push_back(std::move(report));
    }
    return run;
}

std::vector<std::string> split_tools(const std::vector<std::string>& values) {
    std::vector<std::string> tools;
    for (const auto& value : values) {
        std::stringstream in(value);
        for (std::string item; std::getline(in, item, ',');) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            if (!item.empty()) {
                tools.push_back(item);
            }
        }
    }
    return tools;
}

}  // namespace

std::string_view to_string(RunStatus status) noexcept { return kStatusNames[static_cast<std::size_t>(status)]; }

std::string run_to_json(const RunRecord& run) {
    ojson j;
    j["id"] = run.id;
    j["status"] = std::string(to_string(run.status));
    j["tools"] = run.tool_ids;
    if (run.source_name) {
        j["source"] = *run.source_name;
    }
    if (run.dataset) {
        j["dataset"] = *run.dataset;
    }
    if (!run.error.empty()) {
        j["error"] = run.error;
    }
    ojson results = ojson::array();
    if (run.status == RunStatus::Done) {
        for (const auto& tool : run.tool_ids) {
            std::map<DaspCategory, ojson> groups;
            std::size_t issues = 0;
            for (const auto& report : run.reports) {
                if (report.tool_id != tool) {
                    continue;
                }
                const auto findings = ojson::parse(normalize::findings_to_json(report.findings));
                for (std::size_t i = 0; i < report.findings.size(); ++i) {
                    auto finding = findings[i];
                    finding["file"] = report.findings[i].contract_path;
                    auto& group = groups[report.findings[i].category];
                    if (group.is_null()) {
                        group = ojson::array();
                    }
                    group.push_back(std::move(finding));
                    ++issues;
                }
            }
            ojson categories = ojson::array();
            for (auto& [category, findings] : groups) {
                categories.push_back(ojson{{"category", std::string(solscan::to_string(category))},
                                           {"count", findings.size()},
                                           {"findings", std::move(findings)}});
            }
            results.push_back(ojson{{"tool", tool}, {"issues", issues}, {"categories", std::move(categories)}});
        }
    }
    j["results"] = std::move(results);
    j["reports"] = ojson::array();
    for (const auto& report : run.reports) {
        j["reports"].push_back(report_json(report));
    }
    return j.dump(2) + "\n";
}

// -- AnalysisService ------------------------------------------------------------

AnalysisService::AnalysisService(ServiceConfig config)
    : config_(std::move(config)),
      registry_(registry::ToolRegistry::load(config_.config_dir / "tools")),
      taxonomy_(normalize::TaxonomyMap::from_registry(registry_)) {
    const auto dataset_file = config_.config_dir / "dataset" / "dataset.yaml";
    if (fs::is_regular_file(dataset_file)) {
        datasets_ = dataset::load_dataset_config(dataset_file);
    }
    dataset_base_ = fs::absolute(config_.config_dir).lexically_normal().parent_path();
    if (config_.config_dir.filename().empty()) {
        dataset_base_ = dataset_base_.parent_path();
    }
    if (config_.work_dir.empty()) {
        config_.work_dir = fs::temp_directory_path() / "solscan-api";
    }
    fs::create_directories(config_.work_dir);
    if (!config_.runtime) {
        config_.runtime = std::make_shared<exec::DockerRuntime>();
    }
    if (config_.persist_dir) {
        fs::create_directories(*config_.persist_dir);
        for (const auto& entry : fs::directory_iterator(*config_.persist_dir)) {
            if (entry.path().extension() != ".json") {
                continue;
            }
            try {
                std::ifstream in(entry.path());
                auto run = run_from_json(ojson::parse(in));
                if (run.status == RunStatus::Queued || run.status == RunStatus::Running) {
                    run.status = RunStatus::Failed;
                    run.error = "interrupted by a service restart";
                }
                runs_.emplace(run.id, std::move(run));
            } catch (const std::exception&) {
                // Skip unreadable records.
            }
        }
    }
    dispatcher_ = std::jthread([this](std::stop_token stop) { dispatch(stop); });
}

AnalysisService::~AnalysisService() {
    dispatcher_.request_stop();
    wake_.notify_all();
}

std::string AnalysisService::new_id() {
    static std::mutex rng_mutex;
    static std::mt19937_64 rng{std::random_device{}()};
    std::lock_guard lock(rng_mutex);
    std::ostringstream out;
    out << std::hex << std::setfill('0') << std::setw(16) << rng() << std::setw(16) << rng();
    return out.str();
}

void AnalysisService::validate_tools(const std::vector<std::string>& tool_ids) const {
    if (tool_ids.empty()) {
        throw RequestError(400, "no tools selected");
    }
    for (const auto& id : tool_ids) {
        if (!registry_.find(id)) {
            throw RequestError(400, "unknown tool: " + id);
        }
    }
}

std::string AnalysisService::enqueue(RunRecord record, const std::function<void(const std::string&)>& prepare) {
    std::string id;
    {
        std::lock_guard lock(mutex_);
        do {
            id = new_id();
        } while (runs_.contains(id));
        if (prepare) {
            prepare(id);
        }
        record.id = id;
        persist(record);
        runs_.emplace(id, std::move(record));
        queue_.push_back(id);
    }
    wake_.notify_one();
    return id;
}

std::string AnalysisService::submit_source(std::string source, std::string file_name,
                                           std::vector<std::string> tool_ids) {
    if (source.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw RequestError(400, "empty contract source");
    }
    validate_tools(tool_ids);
    RunRecord record;
    record.source_name = sanitize_file_name(std::move(file_name));
    record.tool_ids = std::move(tool_ids);
    const std::string name = *record.source_name;
    return enqueue(std::move(record), [&](const std::string& id) {
        const auto dir = config_.work_dir / id;
        fs::create_directories(dir);
        std::ofstream(dir / name, std::ios::binary) << source;
    });
}

std::string AnalysisService::submit_dataset(const std::string& name, std::vector<std::string> tool_ids) {
    if (std::none_of(datasets_.begin(), datasets_.end(), [&](const auto& ds) { return ds.name == name; })) {
        throw RequestError(400, "unknown dataset: " + name);
    }
    validate_tools(tool_ids);
    RunRecord record;
    record.dataset = name;
    record.tool_ids = std::move(tool_ids);
    return enqueue(std::move(record));
}

std::optional<RunRecord> AnalysisService::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    const auto it = runs_.find(id);
    if (it == runs_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<std::string> AnalysisService::dataset_names() const {
    std::vector<std::string> names;
    for (const auto& ds : datasets_) {
        names.push_back(ds.name);
    }
    return names;
}

void AnalysisService::wait_idle() {
    std::unique_lock lock(mutex_);
    idle_.wait(lock, [&] { return queue_.empty() && !busy_; });
}

void AnalysisService::update(const std::string& id, const std::function<void(RunRecord&)>& change) {
    std::lock_guard lock(mutex_);
    auto& run = runs_.at(id);
    change(run);
    persist(run);
}

void AnalysisService::persist(const RunRecord& run) const {
    if (config_.persist_dir) {
        normalize::write_file_atomic(*config_.persist_dir / (run.id + ".json"), run_to_json(run));
    }
}

void AnalysisService::dispatch(std::stop_token stop) {
    while (true) {
        std::string id;
        {
            std::unique_lock lock(mutex_);
            if (!wake_.wait(lock, stop, [&] { return !queue_.empty(); })) {
                return;
            }
            id = queue_.front();
            queue_.pop_front();
            busy_ = true;
        }
        execute(id);
        {
            std::lock_guard lock(mutex_);
            busy_ = false;
        }
        idle_.notify_all();
    }
}

void AnalysisService::execute(const std::string& id) {
    RunRecord snapshot;
    update(id, [&](RunRecord& run) {
        run.status = RunStatus::Running;
        snapshot = run;
    });
    try {
        std::vector<fs::path> contracts;
        if (snapshot.source_name) {
            contracts.push_back(config_.work_dir / id / *snapshot.source_name);
        } else {
            contracts = dataset::resolve_dataset(*snapshot.dataset, datasets_, dataset_base_);
        }
        std::vector<registry::ToolDescriptor> tools;
        for (const auto& tool_id : snapshot.tool_ids) {
            tools.push_back(registry_.get(tool_id));
        }
        exec::BatchOptions options;
        options.processes = config_.processes;
        options.out_dir = config_.work_dir / id / "results";
        options.log_dir = config_.work_dir / id / "logs";
        options.timeout = config_.timeout;
        auto summary = exec::run_batch(tools, contracts, options, *config_.runtime, taxonomy_);

        // Clients see paths relative to the submission or the dataset root.
        const fs::path shown_base = snapshot.source_name ? config_.work_dir / id : dataset_base_;
        auto shown = [&](const std::string& path) {
            const auto rel = fs::path(path).lexically_relative(shown_base);
            return rel.empty() || *rel.begin() == ".." ? path : rel.generic_string();
        };
        std::vector<normalize::NormalizedReport> reports;
        std::string error;
        for (auto& outcome : summary.outcomes) {
            if (outcome.report) {
                outcome.report->contract_path = shown(outcome.report->contract_path);
                for (auto& finding : outcome.report->findings) {
                    finding.contract_path = shown(finding.contract_path);
                }
                reports.push_back(std::move(*outcome.report));
            } else if (error.empty()) {
                error = outcome.tool_id + ": " + outcome.error;
            }
        }
        update(id, [&](RunRecord& run) {
            run.reports = std::move(reports);
            run.error = error;
            run.status = error.empty() ? RunStatus::Done : RunStatus::Failed;
        });
    } catch (const std::exception& e) {
        update(id, [&](RunRecord& run) {
            run.status = RunStatus::Failed;
            run.error = e.what();
        });
    }
}

// -- ApiServer --------------------------------------------------------------------

struct ApiServer::Impl {
    AnalysisService& service;
    std::string cors_origin;
    httplib::Server server;

    static void send_json(httplib::Response& res, int status, const std::string& body) {
        res.status = status;
        res.set_content(body, "application/json");
    }

    static void send_error(httplib::Response& res, int status, const std::string& message) {
        send_json(res, status, ojson{{"error", message}}.dump() + "\n");
    }

    void handle_analyze(const httplib::Request& req, httplib::Response& res) {
        if (req.body.size() > kMaxBody) {
            send_error(res, 413, "request body exceeds 1 MiB");
            return;
        }
        std::optional<std::string> source;
        std::string file_name = "contract.sol";
        std::optional<std::string> dataset_name;
        std::vector<std::string> tools;

        if (req.is_multipart_form_data()) {
            if (req.has_file("file")) {
                const auto file = req.get_file_value("file");
                source = file.content;
                if (!file.filename.empty()) {
                    file_name = file.filename;
                }
            } else if (req.has_file("source")) {
                source = req.get_file_value("source").content;
            }
            if (req.has_file("dataset")) {
                dataset_name = req.get_file_value("dataset").content;
            }
            std::vector<std::string> values;
            for (const auto& item : req.get_file_values("tools")) {
                values.push_back(item.content);
            }
            tools = split_tools(values);
        } else {
            ojson body;
            try {
                body = ojson::parse(req.body);
            } catch (const ojson::exception&) {
                send_error(res, 400, "expected a JSON body or multipart form");
                return;
            }
            if (!body.is_object()) {
                send_error(res, 400, "expected a JSON object");
                return;
            }
            if (body.contains("source") && body["source"].is_string()) {
                source = body["source"].get<std::string>();
            }
            if (body.contains("filename") && body["filename"].is_string()) {
                file_name = body["filename"].get<std::string>();
            }
            if (body.contains("dataset") && body["dataset"].is_string()) {
                dataset_name = body["dataset"].get<std::string>();
            }
            if (body.contains("tools")) {
                if (body["tools"].is_string()) {
                    tools = split_tools({body["tools"].get<std::string>()});
                } else if (body["tools"].is_array()) {
                    for (const auto& t : body["tools"]) {
                        if (t.is_string()) {
                            tools.push_back(t.get<std::string>());
                        }
                    }
                }
            }
        }

        try {
            std::string id;
            if (source && dataset_name) {
                throw RequestError(400, "give either a source or a dataset, not both");
            } else if (dataset_name) {
                id = service.submit_dataset(*dataset_name, std::move(tools));
            } else {
                id = service.submit_source(source.value_or(""), file_name, std::move(tools));
            }
            const auto run = service.get(id);
            send_json(res, 202, ojson{{"id", id}, {"status", std::string(to_string(run->status))}}.dump() + "\n");
        } catch (const RequestError& e) {
            send_error(res, e.status(), e.what());
        }
    }

    Impl(AnalysisService& s, std::string origin) : service(s), cors_origin(std::move(origin)) {
        server.set_payload_max_length(kMaxBody);
        server.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                                    {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                    {"Access-Control-Allow-Headers", "Content-Type"}});
        server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
        server.Post("/analyze", [this](const httplib::Request& req, httplib::Response& res) { handle_analyze(req, res); });
        server.Get(R"(/runs/([0-9A-Za-z]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto run = service.get(req.matches[1]);
            if (!run) {
                send_error(res, 404, "unknown run: " + std::string(req.matches[1]));
                return;
            }
            send_json(res, 200, run_to_json(*run));
        });
        server.Get("/tools", [this](const httplib::Request&, httplib::Response& res) {
            ojson tools = ojson::array();
            for (const auto& tool : service.registry().tools()) {
                ojson entry{{"id", tool.id}, {"title", tool.title}};
                entry["description"] = tool.description ? ojson(*tool.description) : ojson(nullptr);
                entry["builtin"] = tool.builtin.has_value();
                tools.push_back(std::move(entry));
            }
            send_json(res, 200, tools.dump(2) + "\n");
        });
        server.Get("/datasets", [this](const httplib::Request&, httplib::Response& res) {
            ojson names = ojson::array();
            for (const auto& name : service.dataset_names()) {
                names.push_back(ojson{{"name", name}});
            }
            send_json(res, 200, names.dump(2) + "\n");
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) {
                send_error(res, res.status, res.status == 413 ? "request body exceeds 1 MiB" : "not found");
            }
        });
    }
};

ApiServer::ApiServer(AnalysisService& service, std::string cors_origin)
    : impl_(std::make_unique<Impl>(service, std::move(cors_origin))) {}

ApiServer::~ApiServer() { stop(); }

int ApiServer::bind(const std::string& host, int port) {
    if (port == 0) {
        return impl_->server.bind_to_any_port(host);
    }
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
    if (impl_ && impl_->server.is_running()) {
        impl_->server.stop();
    }
}

}  // namespace solscan::api
