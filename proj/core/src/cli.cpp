#include "solscan/cli.hpp"

#include <algorithm>
#include <iomanip>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "solscan/category_matrix.hpp"
#include "solscan/dataset.hpp"
#include "solscan/error.hpp"
#include "solscan/executor.hpp"
#include "solscan/normalizer.hpp"
#include "solscan/report_io.hpp"
#include "solscan/tool_registry.hpp"

namespace solscan::cli {
namespace {

namespace fs = std::filesystem;

fs::path dataset_config_path(const CliInvocation& inv) { return inv.config_dir / "dataset" / "dataset.yaml"; }

/// Dataset entries are relative to the directory holding `config/`.
fs::path dataset_base_dir(const CliInvocation& inv) {
    const auto parent = fs::absolute(inv.config_dir).lexically_normal().parent_path();
    return inv.config_dir.filename().empty() ? parent.parent_path() : parent;
}

std::unique_ptr<exec::ContainerRuntime> make_runtime(const CliInvocation& inv) {
    if (inv.runtime == "process") {
        if (!inv.stub_map) {
            throw UsageError("--runtime process needs --stub-map FILE");
        }
        return std::make_unique<exec::ProcessRuntime>(exec::ProcessRuntime::load_image_map(*inv.stub_map),
                                                      fs::temp_directory_path() / "solscan-stub");
    }
    return std::make_unique<exec::DockerRuntime>();
}

std::vector<registry::ToolDescriptor> select_tools(const registry::ToolRegistry& registry,
                                                   const std::vector<std::string>& ids) {
    std::vector<registry::ToolDescriptor> tools;
    for (const auto& id : ids) {
        if (id == "all") {
            tools = registry.tools();
            break;
        }
        tools.push_back(registry.get(id));
    }
    std::vector<registry::ToolDescriptor> unique;
    for (auto& tool : tools) {
        if (std::none_of(unique.begin(), unique.end(), [&](const auto& t) { return t.id == tool.id; })) {
            unique.push_back(std::move(tool));
        }
    }
    return unique;
}

int list(const CliInvocation& inv, std::ostream& out) {
    if (*inv.list_target == ListTarget::Tools) {
        for (const auto& tool : registry::list_tools(inv.config_dir / "tools")) {
            out << tool.id << '\n';
        }
    } else {
        for (const auto& ds : dataset::load_dataset_config(dataset_config_path(inv))) {
            out << ds.name << '\n';
        }
    }
    return 0;
}

int info(const CliInvocation& inv, std::ostream& out) {
    const auto registry = registry::ToolRegistry::load(inv.config_dir / "tools");
    for (const auto& id : inv.info_tools) {
        out << registry.tool_info(id) << '\n';
    }
    return 0;
}

int analyze(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    const auto registry = registry::ToolRegistry::load(inv.config_dir / "tools");
    const auto tools = select_tools(registry, inv.tool_ids);

    std::vector<fs::path> contracts;
    if (!inv.files.empty()) {
        contracts = dataset::resolve_paths({inv.files.begin(), inv.files.end()});
    } else {
        const auto config = dataset::load_dataset_config(dataset_config_path(inv));
        const auto base = dataset_base_dir(inv);
        std::vector<fs::path> merged;
        for (const auto& name : inv.dataset_names) {
            auto files = dataset::resolve_dataset(name, config, base);
            merged.insert(merged.end(), files.begin(), files.end());
        }
        contracts = dataset::resolve_paths(merged);
    }
    if (contracts.empty()) {
        err << "no contracts to analyze\n";
        return 0;
    }

    const auto runtime = make_runtime(inv);
    exec::BatchOptions options;
    options.processes = inv.processes;
    options.skip_existing = inv.skip_existing;
    options.out_dir = inv.results_dir;
    options.log_dir = inv.log_dir;
    options.timeout = std::chrono::seconds(inv.timeout_seconds);
    const auto summary =
        exec::run_batch(tools, contracts, options, *runtime, normalize::TaxonomyMap::from_registry(registry));

    for (const auto& outcome : summary.outcomes) {
        using Status = exec::TaskOutcome::Status;
        out << std::left << std::setw(8)
            << (outcome.status == Status::Executed  ? "done"
                : outcome.status == Status::Skipped ? "skipped"
                                                    : "FAILED")
            << ' ' << outcome.tool_id << ' ' << outcome.contract_path;
        if (outcome.report) {
            out << ": " << outcome.report->findings.size() << " finding(s)";
            if (!outcome.report->success) {
                out << " [" << (outcome.report->parse_errors.empty() ? "error" : outcome.report->parse_errors.front())
                    << ']';
            }
        } else if (!outcome.error.empty()) {
            out << ": " << outcome.error;
        }
        out << '\n';
    }
    out << "executed " << summary.executed << ", skipped " << summary.skipped << ", failed " << summary.failed
        << " (" << summary.unsuccessful << " with errors) in " << std::fixed << std::setprecision(2)
        << summary.duration << "s\n";
    out << "results: " << inv.results_dir.string() << "  log: " << summary.log_file.string() << '\n';

    if (inv.annotations) {
        const auto annotations = dataset::load_annotations(*inv.annotations);
        std::vector<std::pair<std::string, report::CategoryMatrix>> columns;
        for (const auto& tool : tools) {
            std::vector<normalize::NormalizedReport> reports;
            for (const auto& outcome : summary.outcomes) {
                if (outcome.tool_id == tool.id && outcome.report) {
                    reports.push_back(*outcome.report);
                }
            }
            columns.emplace_back(tool.id, report::build_category_matrix(reports, annotations));
        }
        out << '\n' << report::render_matrices(columns);
        const auto matrix_file = inv.results_dir / ("matrix_" + summary.stamp + ".json");
        normalize::write_file_atomic(matrix_file, report::matrices_to_json(columns));
        out << "matrix: " << matrix_file.string() << '\n';
    }
    return summary.failed > 0 ? 1 : 0;
}

}  // namespace

std::string synopsis() {
    return "usage: solscan [-h, --help]\n"
           "               (--file FILES | --dataset DATASETS)\n"
           "               --tool TOOLS --info TOOLS\n"
           "               --skip-existing --processes PROCESSES\n"
           "               --list {tools, datasets}\n";
}

CliInvocation parse_args(const std::vector<std::string>& argv) {
    CliInvocation inv;
    CLI::App app{"Runs Solidity analysis tools and normalizes their findings", "solscan"};
    app.set_help_flag();
    bool help = false;
    std::string list_target;
    app.add_flag("-h,--help", help);
    auto* file_opt = app.add_option("--file", inv.files)->expected(1, -1);
    auto* dataset_opt = app.add_option("--dataset", inv.dataset_names)->expected(1, -1);
    file_opt->excludes(dataset_opt);
    app.add_option("--tool", inv.tool_ids)->expected(1, -1);
    app.add_option("--info", inv.info_tools)->expected(1, -1);
    app.add_flag("--skip-existing", inv.skip_existing);
    app.add_option("--processes", inv.processes)->check(CLI::PositiveNumber);
    app.add_option("--list", list_target)->check(CLI::IsMember({"tools", "datasets"}));
    app.add_option("--config-dir", inv.config_dir);
    app.add_option("--results-dir", inv.results_dir);
    app.add_option("--log-dir", inv.log_dir);
    app.add_option("--runtime", inv.runtime)->check(CLI::IsMember({"docker", "process"}));
    app.add_option("--stub-map", inv.stub_map);
    app.add_option("--timeout", inv.timeout_seconds)->check(CLI::PositiveNumber);
    app.add_option("--annotations", inv.annotations);

    std::vector<const char*> raw;
    for (const auto& arg : argv) {
        raw.push_back(arg.c_str());
    }
    if (raw.empty()) {
        raw.push_back("solscan");
    }
    try {
        app.parse(static_cast<int>(raw.size()), raw.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\n" + synopsis());
    }

    if (help) {
        inv.mode = Mode::Help;
    } else if (!list_target.empty()) {
        inv.mode = Mode::List;
        inv.list_target = list_target == "tools" ? ListTarget::Tools : ListTarget::Datasets;
    } else if (!inv.info_tools.empty()) {
        inv.mode = Mode::Info;
    } else if (!inv.files.empty() || !inv.dataset_names.empty()) {
        inv.mode = Mode::Analyze;
        if (inv.tool_ids.empty()) {
            throw UsageError("--tool is required to analyze contracts\n" + synopsis());
        }
    } else {
        throw UsageError("nothing to do: give --file or --dataset, --info or --list\n" + synopsis());
    }
    return inv;
}

int execute(const CliInvocation& inv, std::ostream& out, std::ostream& err) {
    try {
        switch (inv.mode) {
            case Mode::Help:
                out << synopsis() << "\n"
                    << "options:\n"
                       "  --config-dir DIR      tool and dataset configuration (default: config)\n"
                       "  --results-dir DIR     output folder (default: results)\n"
                       "  --log-dir DIR         log folder (default: logs)\n"
                       "  --runtime NAME        docker or process (default: docker)\n"
                       "  --stub-map FILE       image -> executable map for the process runtime\n"
                       "  --timeout SECONDS     per-task limit (default: 1800)\n"
                       "  --annotations DIR     score results against DIR/vulnerabilities.json\n";
                return 0;
            case Mode::List: return list(inv, out);
            case Mode::Info: return info(inv, out);
            case Mode::Analyze: return analyze(inv, out, err);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n' << synopsis();
        return 2;
    } catch (const UnknownTool& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const UnknownDataset& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const MissingPath& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ManifestError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    CliInvocation inv;
    try {
        inv = parse_args(argv);
    } catch (const UsageError& e) {
        err << "error: " << e.what();
        return 2;
    }
    return execute(inv, out, err);
}

}  // namespace solscan::cli
