#include "solscan/container_runtime.hpp"

#include <atomic>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>
#include <yaml-cpp/yaml.h>

#include "solscan/error.hpp"
#include "subprocess.hpp"

namespace solscan::exec {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string unique_suffix() {
    static std::atomic<unsigned> counter{0};
    thread_local std::mt19937_64 rng{std::random_device{}()};
    std::ostringstream out;
    out << ::getpid() << '-' << counter.fetch_add(1) << '-' << std::hex << (rng() & 0xffffff);
    return out.str();
}

/// Rewrites a leading in-container prefix (also after `=` as in --out=/results/x).
std::string map_path(std::string arg, std::string_view from, const std::string& to) {
    auto replace_at = [&](std::size_t at) {
        const std::size_t after = at + from.size();
        if (arg.compare(at, from.size(), from) == 0 && (after == arg.size() || arg[after] == '/')) {
            arg.replace(at, from.size(), to);
            return true;
        }
        return false;
    };
    if (replace_at(0)) {
        return arg;
    }
    if (const auto eq = arg.find('='); eq != std::string::npos) {
        replace_at(eq + 1);
    }
    return arg;
}

/// Owns a scratch directory and removes it on scope exit.
class ScratchDir {
public:
    explicit ScratchDir(fs::path path) : path_(std::move(path)) { fs::create_directories(path_); }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    [[nodiscard]] const fs::path& path() const noexcept { return path_; }

private:
    fs::path path_;
};

}  // namespace

std::vector<std::string> expand_command(std::string_view command_template, std::string_view contract_mount_path) {
    std::vector<std::string> args;
    std::string current;
    bool in_token = false;
    char quote = 0;
    for (char c : command_template) {
        if (quote) {
            if (c == quote) {
                quote = 0;
            } else {
                current.push_back(c);
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
            in_token = true;
        } else if (c == ' ' || c == '\t' || c == '\n') {
            if (in_token) {
                args.push_back(std::move(current));
                current.clear();
                in_token = false;
            }
        } else {
            current.push_back(c);
            in_token = true;
        }
    }
    if (in_token) {
        args.push_back(std::move(current));
    }
    if (command_template.find("{contract}") == std::string_view::npos) {
        args.emplace_back(contract_mount_path);
    }
    for (auto& arg : args) {
        for (auto [key, value] : {std::pair<std::string_view, std::string_view>{"{contract}", contract_mount_path},
                                  {"{results}", kResultsDir}}) {
            for (auto pos = arg.find(key); pos != std::string::npos; pos = arg.find(key, pos + value.size())) {
                arg.replace(pos, key.size(), value);
            }
        }
    }
    return args;
}

// -- ProcessRuntime -----------------------------------------------------------

ProcessRuntime::ProcessRuntime(std::map<std::string, fs::path> executables, fs::path scratch_root)
    : executables_(std::move(executables)), scratch_root_(std::move(scratch_root)) {}

std::map<std::string, fs::path> ProcessRuntime::load_image_map(const fs::path& file) {
    YAML::Node doc;
    try {
        doc = YAML::LoadFile(file.string());
    } catch (const YAML::Exception& e) {
        throw ConfigError("image map " + file.string() + ": " + e.what());
    }
    if (!doc.IsMap()) {
        throw ConfigError("image map " + file.string() + ": expected a mapping");
    }
    std::map<std::string, fs::path> map;
    for (const auto& entry : doc) {
        fs::path exe = entry.second.as<std::string>();
        if (exe.is_relative()) {
            exe = file.parent_path() / exe;
        }
        map.emplace(entry.first.as<std::string>(), exe);
    }
    return map;
}

ContainerResult ProcessRuntime::run(const ContainerRequest& request) {
    const auto exe = executables_.find(request.image);
    if (exe == executables_.end()) {
        throw ImageMissing("no executable registered for image '" + request.image + "'");
    }
    if (::access(exe->second.c_str(), X_OK) != 0) {
        throw ImageMissing("executable for image '" + request.image + "' not found: " + exe->second.string());
    }

    ScratchDir sandbox(scratch_root_ / ("task-" + unique_suffix()));
    const auto contract_dir = sandbox.path() / "contract";
    const auto results_dir = sandbox.path() / "results";
    fs::create_directories(contract_dir);
    fs::create_directories(results_dir);
    const auto contract_copy = contract_dir / request.contract_host_path.filename();
    fs::copy_file(request.contract_host_path, contract_copy, fs::copy_options::overwrite_existing);
    fs::permissions(contract_copy, fs::perms::owner_read | fs::perms::group_read | fs::perms::others_read);

    std::vector<std::string> argv{exe->second.string()};
    for (const auto& arg : request.args) {
        argv.push_back(map_path(map_path(arg, kContractMountDir, contract_dir.string()), kResultsDir,
                                results_dir.string()));
    }

    auto outcome = detail::run_process(argv, request.timeout, sandbox.path());
    ContainerResult result;
    result.exit_code = outcome.exit_code;
    if (!outcome.exit_code && outcome.signal != 0 && !outcome.timed_out) {
        result.exit_code = 128 + outcome.signal;
    }
    result.timed_out = outcome.timed_out;
    result.stdout_text = std::move(outcome.stdout_text);
    result.stderr_text = std::move(outcome.stderr_text);
    if (request.output_file) {
        const fs::path host = map_path(*request.output_file, kResultsDir, results_dir.string());
        if (fs::is_regular_file(host)) {
            result.harvested_files.emplace(*request.output_file, read_file(host));
        }
    }
    return result;
}

// -- DockerRuntime ------------------------------------------------------------

DockerRuntime::DockerRuntime(std::string docker_binary) : docker_(std::move(docker_binary)) {}

ContainerResult DockerRuntime::run(const ContainerRequest& request) {
    const auto docker = detail::find_in_path(docker_);
    if (!docker) {
        throw RuntimeUnavailable("docker client '" + docker_ + "' not found in PATH");
    }
    auto docker_cmd = [&](std::vector<std::string> args, std::chrono::milliseconds timeout = 120s) {
        args.insert(args.begin(), docker->string());
        return detail::run_process(args, timeout);
    };
    if (!checked_) {
        const auto version = docker_cmd({"version", "--format", "{{.Server.Version}}"}, 30s);
        if (version.exit_code != 0) {
            throw RuntimeUnavailable("docker engine unreachable: " + version.stderr_text);
        }
        checked_ = true;
    }
    if (docker_cmd({"image", "inspect", request.image}).exit_code != 0) {
        const auto pull = docker_cmd({"pull", request.image}, 1800s);
        if (pull.exit_code != 0) {
            throw ImageMissing("cannot pull image '" + request.image + "': " + pull.stderr_text);
        }
    }

    ScratchDir mount(fs::temp_directory_path() / ("solscan-mount-" + unique_suffix()));
    fs::copy_file(request.contract_host_path, mount.path() / request.contract_host_path.filename());
    const std::string name = "solscan-" + unique_suffix();

    std::vector<std::string> create{"create", "--name", name, "-v",
                                    fs::absolute(mount.path()).string() + ":" + std::string(kContractMountDir) + ":ro",
                                    request.image};
    create.insert(create.end(), request.args.begin(), request.args.end());
    if (const auto created = docker_cmd(create); created.exit_code != 0) {
        throw RuntimeUnavailable("docker create failed: " + created.stderr_text);
    }

    ContainerResult result;
    docker_cmd({"start", name});
    const auto waited = docker_cmd({"wait", name}, request.timeout);
    if (waited.timed_out) {
        docker_cmd({"kill", name});
        result.timed_out = true;
    } else {
        try {
            result.exit_code = std::stoi(waited.stdout_text);
        } catch (const std::exception&) {
            result.exit_code = -1;
        }
    }
    auto logs = docker_cmd({"logs", name});
    result.stdout_text = std::move(logs.stdout_text);
    result.stderr_text = std::move(logs.stderr_text);
    if (request.output_file) {
        const auto target = mount.path() / "harvested";
        if (docker_cmd({"cp", name + ":" + *request.output_file, target.string()}).exit_code == 0 &&
            fs::is_regular_file(target)) {
            result.harvested_files.emplace(*request.output_file, read_file(target));
        }
    }
    docker_cmd({"rm", "-f", name});
    return result;
}

}  // namespace solscan::exec
