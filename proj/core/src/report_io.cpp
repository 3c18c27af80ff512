#include "solscan/report_io.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>
#include <nlohmann/json.hpp>

namespace solscan::normalize {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

ojson finding_to_json(const Finding& f, std::string_view default_contract) {
    ojson j;
    j["rule"] = f.rule_id;
    j["category"] = std::string(to_string(f.category));
    j["line_start"] = f.lines.start;
    j["line_end"] = f.lines.end;
    j["message"] = f.message;
    if (!f.snippet.empty()) {
        j["snippet"] = f.snippet;
    }
    if (f.severity) {
        j["severity"] = std::string(to_string(*f.severity));
    }
    if (f.external_tool) {
        j["origin"] = *f.external_tool;
    }
    if (f.contract_path != default_contract) {
        j["file"] = f.contract_path;
    }
    return j;
}

Finding finding_from_json(const ojson& j, std::string_view default_contract) {
    Finding f;
    f.rule_id = j.at("rule").get<std::string>();
    const auto category = j.at("category").get<std::string>();
    const auto parsed = parse_category(category);
    if (!parsed) {
        throw std::invalid_argument("unknown category '" + category + "'");
    }
    f.category = *parsed;
    f.lines.start = j.at("line_start").get<std::size_t>();
    f.lines.end = j.at("line_end").get<std::size_t>();
    f.message = j.at("message").get<std::string>();
    f.snippet = j.value("snippet", std::string{});
    if (j.contains("severity")) {
        const auto text = j.at("severity").get<std::string>();
        f.severity = parse_severity(text);
        if (!f.severity) {
            throw std::invalid_argument("unknown severity '" + text + "'");
        }
    }
    if (j.contains("origin")) {
        f.external_tool = j.at("origin").get<std::string>();
    }
    f.contract_path = j.value("file", std::string(default_contract));
    return f;
}

ojson parse_json(std::string_view text) {
    try {
        return ojson::parse(text);
    } catch (const ojson::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::system_error(errno, std::generic_category(), "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

template <typename F>
auto rethrow_as_invalid(F&& body) {
    try {
        return body();
    } catch (const ojson::exception& e) {
        throw std::invalid_argument(e.what());
    }
}

}  // namespace

std::string findings_to_json(const std::vector<Finding>& findings, std::string_view default_contract) {
    ojson array = ojson::array();
    for (const auto& f : findings) {
        array.push_back(finding_to_json(f, default_contract));
    }
    return array.dump(2) + "\n";
}

std::vector<Finding> findings_from_json(std::string_view text, std::string_view default_contract) {
    const ojson doc = parse_json(text);
    return rethrow_as_invalid([&] {
        if (!doc.is_array()) {
            throw std::invalid_argument("expected a JSON array of findings");
        }
        std::vector<Finding> findings;
        for (const auto& item : doc) {
            findings.push_back(finding_from_json(item, default_contract));
        }
        return findings;
    });
}

std::string report_to_json(const NormalizedReport& report) {
    ojson j;
    j["tool"] = report.tool_id;
    j["contract"] = report.contract_path;
    j["success"] = report.success;
    j["findings"] = ojson::array();
    for (const auto& f : report.findings) {
        j["findings"].push_back(finding_to_json(f, report.contract_path));
    }
    j["errors"] = report.parse_errors;
    return j.dump(2) + "\n";
}

NormalizedReport report_from_json(std::string_view text) {
    const ojson doc = parse_json(text);
    return rethrow_as_invalid([&] {
        NormalizedReport report;
        report.tool_id = doc.at("tool").get<std::string>();
        report.contract_path = doc.at("contract").get<std::string>();
        report.success = doc.at("success").get<bool>();
        for (const auto& item : doc.at("findings")) {
            report.findings.push_back(finding_from_json(item, report.contract_path));
        }
        report.parse_errors = doc.at("errors").get<std::vector<std::string>>();
        return report;
    });
}

void write_file_atomic(const fs::path& path, std::string_view bytes) {
    static std::atomic<unsigned> counter{0};
    const fs::path tmp = path.parent_path() / ("." + path.filename().string() + ".tmp-" + std::to_string(::getpid()) +
                                               "-" + std::to_string(counter.fetch_add(1)));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.close();
        if (!out) {
            std::error_code ignored;
            fs::remove(tmp, ignored);
            throw std::system_error(errno, std::generic_category(), "cannot write " + tmp.string());
        }
    }
    fs::rename(tmp, path);
}

void write_report(const NormalizedReport& report, std::string_view raw_output, const RunMetadata& meta,
                  const fs::path& dir) {
    ojson run;
    run["tool"] = report.tool_id;
    run["contract"] = report.contract_path;
    run["contract_md5"] = meta.contract_md5;
    run["stamp"] = meta.stamp;
    run["duration"] = report.duration;
    run["started_at"] = meta.started_at;
    run["finished_at"] = meta.finished_at;
    run["exit_status"] = meta.timed_out ? ojson("timeout") : meta.exit_code ? ojson(*meta.exit_code) : ojson(nullptr);
    run["stderr"] = meta.stderr_text;

    fs::create_directories(dir);
    write_file_atomic(dir / kRawFile, raw_output);
    write_file_atomic(dir / kRunFile, run.dump(2) + "\n");
    write_file_atomic(dir / kReportFile, report_to_json(report));
}

std::optional<RunMetadata> read_run_metadata(const fs::path& dir) {
    const auto path = dir / kRunFile;
    if (!fs::is_regular_file(path)) {
        return std::nullopt;
    }
    const ojson run = parse_json(read_text(path));
    return rethrow_as_invalid([&] {
        RunMetadata meta;
        meta.contract_md5 = run.value("contract_md5", std::string{});
        meta.stamp = run.value("stamp", std::string{});
        meta.started_at = run.value("started_at", std::string{});
        meta.finished_at = run.value("finished_at", std::string{});
        meta.stderr_text = run.value("stderr", std::string{});
        const auto& status = run.at("exit_status");
        if (status.is_number_integer()) {
            meta.exit_code = status.get<int>();
        } else if (status.is_string()) {
            meta.timed_out = true;
        }
        return meta;
    });
}

NormalizedReport read_report(const fs::path& dir) {
    NormalizedReport report = report_from_json(read_text(dir / kReportFile));
    const auto run_path = dir / kRunFile;
    if (fs::is_regular_file(run_path)) {
        const ojson run = parse_json(read_text(run_path));
        report.duration = run.value("duration", 0.0);
    }
    return report;
}

}  // namespace solscan::normalize
