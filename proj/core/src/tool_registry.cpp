#include "solscan/tool_registry.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "solscan/error.hpp"

namespace solscan::registry {
namespace {

std::optional<std::string> scalar(const YAML::Node& node, const char* key) {
    const auto child = node[key];
    if (!child || !child.IsScalar()) {
        return std::nullopt;
    }
    return child.as<std::string>();
}

}  // namespace

ToolDescriptor load_tool_config(std::string_view text, std::string id) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw ConfigError("tool '" + id + "': " + e.what());
    }
    if (!doc.IsMap()) {
        throw ConfigError("tool '" + id + "': configuration must be a mapping");
    }

    ToolDescriptor tool;
    tool.id = std::move(id);

    if (const auto builtin = scalar(doc, "builtin")) {
        if (*builtin == "extended") {
            tool.builtin = BuiltinRuleset::Extended;
        } else if (*builtin == "base") {
            tool.builtin = BuiltinRuleset::Base;
        } else {
            throw ConfigError("tool '" + tool.id + "': builtin must be 'base' or 'extended'");
        }
    }

    // Built-in tools run in-process and need neither an image nor a command.
    const auto images = doc["docker_image"];
    if (!images && tool.builtin) {
        tool.image_default = "in-process";
    } else if (!images) {
        throw ConfigError("tool '" + tool.id + "': missing docker_image");
    }
    if (images.IsScalar()) {
        tool.image_default = images.as<std::string>();
    } else if (images.IsMap()) {
        tool.image_default = scalar(images, "default").value_or("");
        tool.image_solc_lt5 = scalar(images, "solc<5");
    }
    if (tool.image_default.empty()) {
        throw ConfigError("tool '" + tool.id + "': docker_image has no default entry");
    }

    tool.command = scalar(doc, "cmd").value_or("");
    if (tool.command.empty() && !tool.builtin) {
        throw ConfigError("tool '" + tool.id + "': missing cmd");
    }

    tool.title = scalar(doc, "name").value_or(tool.id);
    tool.description = scalar(doc, "description");
    if (const auto out = doc["output_in_files"]; out && out.IsMap()) {
        tool.output_file = scalar(out, "folder");
    }

    tool.parser_id = scalar(doc, "parser").value_or(tool.builtin ? std::string(kBuiltinParserId) : tool.id);

    if (const auto cats = doc["categories"]; cats && cats.IsMap()) {
        for (const auto& entry : cats) {
            const auto rule = entry.first.as<std::string>();
            const auto label = entry.second.as<std::string>();
            const auto category = parse_category(label);
            if (!category) {
                throw ConfigError("tool '" + tool.id + "': unknown category '" + label + "' for rule '" + rule + "'");
            }
            tool.categories.emplace(rule, *category);
        }
    }
    return tool;
}

const std::string& select_image(const ToolDescriptor& tool, const ir::VersionConstraint& version) {
    if (version.classification == ir::VersionClass::BelowV5 && tool.image_solc_lt5) {
        return *tool.image_solc_lt5;
    }
    return tool.image_default;
}

ToolRegistry::ToolRegistry(std::vector<ToolDescriptor> tools) : tools_(std::move(tools)) {
    std::sort(tools_.begin(), tools_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
}

ToolRegistry ToolRegistry::load(const std::filesystem::path& registry_dir) {
    if (!std::filesystem::is_directory(registry_dir)) {
        throw ConfigError("tool registry directory not found: " + registry_dir.string());
    }
    std::vector<ToolDescriptor> tools;
    for (const auto& entry : std::filesystem::directory_iterator(registry_dir)) {
        const auto config = entry.path() / "config.yaml";
        if (!entry.is_directory() || !std::filesystem::is_regular_file(config)) {
            continue;
        }
        std::ifstream in(config);
        std::ostringstream text;
        text << in.rdbuf();
        tools.push_back(load_tool_config(text.str(), entry.path().filename().string()));
    }
    return ToolRegistry(std::move(tools));
}

const ToolDescriptor* ToolRegistry::find(std::string_view id) const noexcept {
    auto it = std::find_if(tools_.begin(), tools_.end(), [&](const auto& t) { return t.id == id; });
    return it == tools_.end() ? nullptr : &*it;
}

const ToolDescriptor& ToolRegistry::get(std::string_view id) const {
    if (const auto* tool = find(id)) {
        return *tool;
    }
    throw UnknownTool(std::string(id));
}

std::string ToolRegistry::tool_info(std::string_view id) const {
    const auto& tool = get(id);
    std::string text = tool.title + " (" + tool.id + ")\n";
    text += tool.description.value_or("No description available.");
    text += '\n';
    return text;
}

std::vector<ToolDescriptor> list_tools(const std::filesystem::path& registry_dir) {
    return ToolRegistry::load(registry_dir).tools();
}

}  // namespace solscan::registry
