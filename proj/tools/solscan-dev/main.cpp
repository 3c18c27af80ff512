// Developer utilities around the library: IR dumps, rule runs, pragma
// classification, corpus statistics and detection matrices.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "solscan/category_matrix.hpp"
#include "solscan/dataset.hpp"
#include "solscan/error.hpp"
#include "solscan/parser.hpp"
#include "solscan/pragma.hpp"
#include "solscan/report_io.hpp"
#include "solscan/rules.hpp"

namespace {

using namespace solscan;

std::vector<Finding> analyze(const std::string& path, bool base) {
    const auto file = ir::SourceFile::load(path);
    const auto tree = ir::parse_source(file);
    return rules::run_rules(tree, file, base ? rules::base_ruleset() : rules::extended_ruleset());
}

normalize::NormalizedReport builtin_report(const std::string& path, bool base) {
    normalize::NormalizedReport report;
    report.tool_id = base ? "builtin-smartcheck" : "builtin-smartcheck-ext";
    report.contract_path = path;
    report.findings = analyze(path, base);
    report.success = true;
    return report;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solscan developer tools", "solscan-dev"};
    app.require_subcommand(1);

    std::string file;
    bool base = false;
    bool json = false;
    bool manifest = false;
    std::string corpus;

    auto* dump = app.add_subcommand("dump-ir", "print the parse tree as XML");
    dump->add_option("file", file)->required();

    std::vector<std::string> files;
    auto* rules_cmd = app.add_subcommand("rules", "run the built-in rules");
    rules_cmd->add_option("files", files);
    rules_cmd->add_flag("--base", base, "base ruleset instead of the extended one");
    rules_cmd->add_flag("--json", json, "findings as JSON");
    rules_cmd->add_flag("--manifest", manifest, "list rules and patterns");

    auto* pragma = app.add_subcommand("pragma", "classify the solidity pragma");
    pragma->add_option("file", file)->required();

    auto* key = app.add_subcommand("dedup-key", "whitespace-insensitive MD5");
    key->add_option("file", file)->required();

    auto* stats = app.add_subcommand("stats", "per-category corpus statistics");
    stats->add_option("corpus", corpus)->required();

    auto* matrix = app.add_subcommand("matrix", "detection matrix of both built-in rulesets on a corpus");
    matrix->add_option("corpus", corpus)->required();
    matrix->add_flag("--json", json);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*dump) {
            std::cout << ir::dump_xml(ir::parse_source(ir::SourceFile::load(file)));
        } else if (*rules_cmd) {
            const auto ruleset = base ? rules::base_ruleset() : rules::extended_ruleset();
            if (manifest) {
                std::cout << rules::rules_manifest(ruleset);
            }
            for (const auto& path : files) {
                const auto findings = analyze(path, base);
                if (json) {
                    std::cout << normalize::findings_to_json(findings);
                    continue;
                }
                for (const auto& f : findings) {
                    std::cout << f.contract_path << ':' << f.lines.start << ": " << f.rule_id << " ["
                              << to_string(f.category) << "] " << f.snippet << '\n';
                }
            }
        } else if (*pragma) {
            const auto version = ir::extract_pragma(ir::SourceFile::load(file));
            std::cout << (version.raw.empty() ? "(none)" : version.raw) << ' ' << to_string(version.classification)
                      << '\n';
        } else if (*key) {
            std::ifstream in(file, std::ios::binary);
            std::ostringstream text;
            text << in.rdbuf();
            std::cout << dataset::dedup_key(text.str()) << '\n';
        } else if (*stats) {
            std::cout << dataset::render_stats(dataset::corpus_stats(dataset::load_annotations(corpus)));
        } else if (*matrix) {
            const auto annotations = dataset::load_annotations(corpus);
            std::vector<std::string> paths;
            for (const auto& a : annotations) {
                if (std::find(paths.begin(), paths.end(), a.path.string()) == paths.end()) {
                    paths.push_back(a.path.string());
                }
            }
            std::vector<std::pair<std::string, report::CategoryMatrix>> columns;
            for (const bool use_base : {true, false}) {
                std::vector<normalize::NormalizedReport> reports;
                for (const auto& path : paths) {
                    reports.push_back(builtin_report(path, use_base));
                }
                columns.emplace_back(reports.front().tool_id, report::build_category_matrix(reports, annotations));
            }
            std::cout << (json ? report::matrices_to_json(columns) : report::render_matrices(columns));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
