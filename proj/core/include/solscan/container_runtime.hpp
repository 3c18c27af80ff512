#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace solscan::exec {

/// In-container locations shared by every runtime.
inline constexpr std::string_view kContractMountDir = "/contract";
inline constexpr std::string_view kResultsDir = "/results";

struct ContainerRequest {
    std::string image;
    /// Arguments as seen inside the container.
    std::vector<std::string> args;
    std::filesystem::path contract_host_path;
    /// `/contract/<file name>`.
    std::string contract_mount_path;
    std::optional<std::string> output_file;
    std::chrono::milliseconds timeout{std::chrono::seconds(1800)};
};

struct ContainerResult {
    std::optional<int> exit_code;
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
    /// In-container path -> file bytes.
    std::map<std::string, std::string> harvested_files;
};

/// Executes one tool invocation with the contract mounted read-only.
/// Implementations throw RuntimeUnavailable when the engine cannot be reached
/// and ImageMissing when the image cannot be obtained.
class ContainerRuntime {
public:
    virtual ~ContainerRuntime() = default;
    [[nodiscard]] virtual std::string name() const = 0;
    virtual ContainerResult run(const ContainerRequest& request) = 0;
};

/// Docker engine driven through the `docker` client binary
/// (create / start / wait / logs / cp / rm).
class DockerRuntime final : public ContainerRuntime {
public:
    explicit DockerRuntime(std::string docker_binary = "docker");
    [[nodiscard]] std::string name() const override { return "docker"; }
    ContainerResult run(const ContainerRequest& request) override;

private:
    std::string docker_;
    std::atomic<bool> checked_{false};
};

/// Stand-in for a container engine: images map to local executables that run
/// inside a scratch directory laid out like the container (`contract/` holds a
/// read-only copy of the contract, `results/` is writable). In-container paths
/// in the arguments are rewritten to the scratch directory.
class ProcessRuntime final : public ContainerRuntime {
public:
    ProcessRuntime(std::map<std::string, std::filesystem::path> executables, std::filesystem::path scratch_root);
    [[nodiscard]] std::string name() const override { return "process"; }
    ContainerResult run(const ContainerRequest& request) override;

    /// Reads an `image: executable` YAML mapping. Relative executables resolve
    /// against the file's directory.
    static std::map<std::string, std::filesystem::path> load_image_map(const std::filesystem::path& file);

private:
    std::map<std::string, std::filesystem::path> executables_;
    std::filesystem::path scratch_root_;
};

/// Splits a command template on whitespace (single and double quotes group)
/// and substitutes {contract} and {results}. Without a {contract} placeholder
/// the contract path is appended as the last argument.
[[nodiscard]] std::vector<std::string> expand_command(std::string_view command_template,
                                                      std::string_view contract_mount_path);

}  // namespace solscan::exec
