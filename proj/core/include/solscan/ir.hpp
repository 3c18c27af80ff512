#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solscan::ir {

enum class NodeKind {
    SourceUnit,
    PragmaDirective,
    ContractDef,
    FunctionDef,
    ModifierDef,
    ModifierInvocation,
    ParameterList,
    Block,
    ExpressionStatement,
    IfStatement,
    RequireCall,
    Assignment,
    FunctionCall,
    MemberAccess,
    Identifier,
    Literal,
    BinaryOp,
    UnaryOp,
    Unparsed,
};

[[nodiscard]] std::string_view to_string(NodeKind kind) noexcept;
[[nodiscard]] std::optional<NodeKind> node_kind_from_string(std::string_view name) noexcept;

/// Byte range [begin, end) into the source text plus the 1-based lines it covers.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t first_line = 1;
    std::size_t last_line = 1;

    [[nodiscard]] bool contains(const Span& other) const noexcept {
        return begin <= other.begin && other.end <= end && first_line <= other.first_line &&
               other.last_line <= last_line;
    }

    friend bool operator==(const Span&, const Span&) = default;
};

/// One node of the parse-tree IR. Trees are owned by value from the root down.
struct Node {
    NodeKind kind = NodeKind::Unparsed;
    std::map<std::string, std::string, std::less<>> attributes;
    std::vector<Node> children;
    Span span;

    [[nodiscard]] const std::string* attribute(std::string_view key) const {
        auto it = attributes.find(key);
        return it == attributes.end() ? nullptr : &it->second;
    }

    [[nodiscard]] std::string attribute_or(std::string_view key, std::string fallback = {}) const {
        const auto* value = attribute(key);
        return value ? *value : std::move(fallback);
    }

    friend bool operator==(const Node&, const Node&) = default;
};

/// Attribute keys the parser may populate. Query predicates must use one of these.
[[nodiscard]] const std::vector<std::string_view>& known_attribute_keys() noexcept;

/// Indented XML-like rendering, one element per node, attributes inline.
[[nodiscard]] std::string dump_xml(const Node& root);

}  // namespace solscan::ir
