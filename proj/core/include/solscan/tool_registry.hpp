#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solscan/dasp.hpp"
#include "solscan/pragma.hpp"

namespace solscan::registry {

/// Tool id of the in-process detector running the extended ruleset.
inline constexpr std::string_view kBuiltinToolId = "builtin-smartcheck-ext";
inline constexpr std::string_view kBuiltinParserId = "builtin";

enum class BuiltinRuleset { Base, Extended };

struct ToolDescriptor {
    std::string id;
    std::string title;
    std::optional<std::string> description;
    std::string image_default;
    std::optional<std::string> image_solc_lt5;
    /// Argument template; may use {contract} and {results}.
    std::string command;
    /// In-container path of the results file; absent means stdout is parsed.
    std::optional<std::string> output_file;
    std::string parser_id;
    /// Set for tools executed in-process instead of in a container.
    std::optional<BuiltinRuleset> builtin;
    /// Tool rule name -> category, from the optional `categories:` block.
    std::map<std::string, DaspCategory, std::less<>> categories;

    friend bool operator==(const ToolDescriptor&, const ToolDescriptor&) = default;
};

/// Parses a plugin `config.yaml`. Throws ConfigError when `docker_image`
/// (with a `default` entry) or `cmd` is missing, or when the document is not
/// valid YAML. Built-in tools need neither.
[[nodiscard]] ToolDescriptor load_tool_config(std::string_view text, std::string id);

/// The solc<5 image for contracts whose pragma only admits versions below
/// 0.5.0 when one is configured, the default image otherwise.
[[nodiscard]] const std::string& select_image(const ToolDescriptor& tool, const ir::VersionConstraint& version);

class ToolRegistry {
public:
    ToolRegistry() = default;
    explicit ToolRegistry(std::vector<ToolDescriptor> tools);

    /// Loads every `<dir>/<id>/config.yaml`, sorted by id.
    static ToolRegistry load(const std::filesystem::path& registry_dir);

    [[nodiscard]] const std::vector<ToolDescriptor>& tools() const noexcept { return tools_; }
    [[nodiscard]] const ToolDescriptor* find(std::string_view id) const noexcept;
    /// Throws UnknownTool.
    [[nodiscard]] const ToolDescriptor& get(std::string_view id) const;
    /// Title followed by the description. Throws UnknownTool.
    [[nodiscard]] std::string tool_info(std::string_view id) const;

private:
    std::vector<ToolDescriptor> tools_;
};

[[nodiscard]] std::vector<ToolDescriptor> list_tools(const std::filesystem::path& registry_dir);

}  // namespace solscan::registry
