#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "solscan/finding.hpp"
#include "solscan/raw_result.hpp"
#include "solscan/tool_registry.hpp"

namespace solscan::normalize {

/// Parser ids shipped with the library besides `builtin`.
inline constexpr std::string_view kMockLinesParser = "mock-lines";
inline constexpr std::string_view kMockJsonParser = "mock-json";

struct NormalizedReport {
    std::string tool_id;
    std::string contract_path;
    std::vector<Finding> findings;
    std::vector<std::string> parse_errors;
    bool success = false;
    double duration = 0.0;

    friend bool operator==(const NormalizedReport&, const NormalizedReport&) = default;
};

/// (tool id, tool rule name) -> category.
class TaxonomyMap {
public:
    /// The built-in rules under both built-in tool ids.
    static TaxonomyMap defaults();
    /// Defaults plus every `categories:` block of the registry.
    static TaxonomyMap from_registry(const registry::ToolRegistry& registry);

    void add(std::string tool_id, std::string rule_name, DaspCategory category);
    [[nodiscard]] const std::map<std::pair<std::string, std::string>, DaspCategory>& entries() const noexcept {
        return entries_;
    }

private:
    std::map<std::pair<std::string, std::string>, DaspCategory> entries_;
};

/// Looked-up category, Other when the pair is unknown.
[[nodiscard]] DaspCategory map_to_dasp(const TaxonomyMap& map, std::string_view tool_id, std::string_view rule_name);

struct ParserInput {
    const registry::ToolDescriptor& tool;
    const exec::RawResult& raw;
    /// stdout, or the harvested output file when the tool declares one.
    std::string_view text;
    const TaxonomyMap& taxonomy;
};

struct ParserOutput {
    std::vector<Finding> findings;
    std::vector<std::string> errors;
};

/// A parser may throw; the exception becomes the report's only parse error.
using OutputParser = std::function<ParserOutput(const ParserInput&)>;

class ParserRegistry {
public:
    /// builtin, mock-lines and mock-json.
    static ParserRegistry defaults();

    void add(std::string parser_id, OutputParser parser);
    [[nodiscard]] const OutputParser* find(std::string_view parser_id) const;

private:
    std::map<std::string, OutputParser, std::less<>> parsers_;
};

/// The bytes a tool's parser reads and `output.raw` preserves.
[[nodiscard]] std::string raw_output(const registry::ToolDescriptor& tool, const exec::RawResult& raw);

/// Never throws. Unknown parser ids and unparseable output give zero findings,
/// success=false and exactly one parse error. A timeout always puts "timed out"
/// first; any other abnormal exit adds a marker unless the parser already
/// reported an error.
[[nodiscard]] NormalizedReport parse_tool_output(const registry::ToolDescriptor& tool, const exec::RawResult& raw,
                                                 const TaxonomyMap& taxonomy,
                                                 const ParserRegistry& parsers = ParserRegistry::defaults());

}  // namespace solscan::normalize
