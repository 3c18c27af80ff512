#include "solscan/normalizer.hpp"

#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "solscan/report_io.hpp"
#include "solscan/rules.hpp"

namespace solscan::normalize {
namespace {

using nlohmann::json;

constexpr std::string_view kBuiltinBaseToolId = "builtin-smartcheck";

void add_builtin_rules(TaxonomyMap& map, const std::string& tool_id) {
    for (const auto& rule : rules::extended_ruleset()) {
        map.add(tool_id, rule.id, rule.category);
    }
    for (const auto& rule : rules::base_ruleset()) {
        map.add(tool_id, rule.id, rule.category);
    }
}

Finding external_finding(const ParserInput& in, std::string rule, LineRange lines, std::string message) {
    Finding finding;
    finding.category = map_to_dasp(in.taxonomy, in.tool.id, rule);
    finding.rule_id = std::move(rule);
    finding.contract_path = in.raw.contract_path;
    finding.lines = lines;
    finding.message = std::move(message);
    finding.external_tool = in.tool.id;
    return finding;
}

std::string first_line(std::string_view text) {
    const auto start = text.find_first_not_of(" \t\r\n");
    if (start == std::string_view::npos) {
        return {};
    }
    text.remove_prefix(start);
    return std::string(text.substr(0, text.find_first_of("\r\n")));
}

ParserOutput parse_builtin(const ParserInput& in) {
    ParserOutput out;
    if (in.raw.abnormal()) {
        const auto detail = first_line(in.raw.stderr_text);
        out.errors.push_back(detail.empty() ? "built-in detector failed" : detail);
        return out;
    }
    out.findings = findings_from_json(in.text, in.raw.contract_path);
    return out;
}

// issue <RULE> <start>[-<end>] <message...>
// <N> issue(s)
ParserOutput parse_mock_lines(const ParserInput& in) {
    static const std::regex issue_re(R"(^issue\s+(\S+)\s+(\d+)(?:-(\d+))?(?:\s+(.*))?$)");
    static const std::regex summary_re(R"(^(\d+)\s+issues?\s*$)");
    ParserOutput out;
    std::optional<std::size_t> announced;
    std::istringstream lines{std::string(in.text)};
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        std::smatch m;
        if (std::regex_match(line, m, issue_re)) {
            LineRange range;
            range.start = std::stoul(m[2].str());
            range.end = m[3].matched ? std::stoul(m[3].str()) : range.start;
            out.findings.push_back(external_finding(in, m[1].str(), range, m[4].str()));
        } else if (std::regex_match(line, m, summary_re)) {
            announced = std::stoul(m[1].str());
        }
    }
    if (!announced) {
        out.findings.clear();
        out.errors.emplace_back("no issue summary line in tool output");
    } else if (*announced != out.findings.size()) {
        out.errors.push_back("tool announced " + std::to_string(*announced) + " issues but reported " +
                             std::to_string(out.findings.size()));
    }
    return out;
}

// {"vulnerabilities": [{"name": ..., "line": N | "lines": [a, b], "description": ...}]}
ParserOutput parse_mock_json(const ParserInput& in) {
    ParserOutput out;
    const json doc = json::parse(in.text);
    for (const auto& item : doc.at("vulnerabilities")) {
        LineRange range;
        if (item.contains("lines")) {
            range.start = item.at("lines").at(0).get<std::size_t>();
            range.end = item.at("lines").at(1).get<std::size_t>();
        } else if (item.contains("line")) {
            range.start = range.end = item.at("line").get<std::size_t>();
        }
        out.findings.push_back(external_finding(in, item.at("name").get<std::string>(), range,
                                                item.value("description", std::string{})));
    }
    return out;
}

}  // namespace

TaxonomyMap TaxonomyMap::defaults() {
    TaxonomyMap map;
    add_builtin_rules(map, std::string(registry::kBuiltinToolId));
    add_builtin_rules(map, std::string(kBuiltinBaseToolId));
    return map;
}

TaxonomyMap TaxonomyMap::from_registry(const registry::ToolRegistry& registry) {
    TaxonomyMap map = defaults();
    for (const auto& tool : registry.tools()) {
        if (tool.builtin) {
            add_builtin_rules(map, tool.id);
        }
        for (const auto& [rule, category] : tool.categories) {
            map.add(tool.id, rule, category);
        }
    }
    return map;
}

void TaxonomyMap::add(std::string tool_id, std::string rule_name, DaspCategory category) {
    entries_.insert_or_assign({std::move(tool_id), std::move(rule_name)}, category);
}

DaspCategory map_to_dasp(const TaxonomyMap& map, std::string_view tool_id, std::string_view rule_name) {
    const auto it = map.entries().find({std::string(tool_id), std::string(rule_name)});
    return it == map.entries().end() ? DaspCategory::Other : it->second;
}

ParserRegistry ParserRegistry::defaults() {
    ParserRegistry registry;
    registry.add(std::string(registry::kBuiltinParserId), parse_builtin);
    registry.add(std::string(kMockLinesParser), parse_mock_lines);
    registry.add(std::string(kMockJsonParser), parse_mock_json);
    return registry;
}

void ParserRegistry::add(std::string parser_id, OutputParser parser) {
    parsers_.insert_or_assign(std::move(parser_id), std::move(parser));
}

const OutputParser* ParserRegistry::find(std::string_view parser_id) const {
    const auto it = parsers_.find(parser_id);
    return it == parsers_.end() ? nullptr : &it->second;
}

std::string raw_output(const registry::ToolDescriptor& tool, const exec::RawResult& raw) {
    if (tool.output_file) {
        const auto it = raw.harvested_files.find(*tool.output_file);
        return it == raw.harvested_files.end() ? std::string{} : it->second;
    }
    return raw.stdout_text;
}

NormalizedReport parse_tool_output(const registry::ToolDescriptor& tool, const exec::RawResult& raw,
                                   const TaxonomyMap& taxonomy, const ParserRegistry& parsers) {
    NormalizedReport report;
    report.tool_id = tool.id;
    report.contract_path = raw.contract_path;
    report.duration = raw.duration_seconds();

    const OutputParser* parser = parsers.find(tool.parser_id);
    if (!parser) {
        report.parse_errors.push_back("no parser registered for '" + tool.parser_id + "'");
    } else if (tool.output_file && !raw.harvested_files.contains(*tool.output_file) && !raw.abnormal()) {
        report.parse_errors.push_back("output file " + *tool.output_file + " was not produced");
    } else {
        const std::string text = raw_output(tool, raw);
        try {
            ParserOutput out = (*parser)(ParserInput{tool, raw, text, taxonomy});
            report.findings = std::move(out.findings);
            report.parse_errors = std::move(out.errors);
        } catch (const std::exception& e) {
            report.findings.clear();
            report.parse_errors.push_back(std::string("unparseable output: ") + e.what());
        }
    }
    // A timeout explains whatever the parser made of the partial output.
    if (raw.timed_out) {
        report.parse_errors.insert(report.parse_errors.begin(), "timed out");
    } else if (report.parse_errors.empty() && raw.abnormal()) {
        report.parse_errors.push_back(raw.exit_code ? "exit status " + std::to_string(*raw.exit_code)
                                                    : std::string("terminated abnormally"));
    }
    report.success = report.parse_errors.empty() && !raw.abnormal();
    return report;
}

}  // namespace solscan::normalize
