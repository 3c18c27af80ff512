#include "solscan/ir.hpp"

#include <array>
#include <sstream>

namespace solscan::ir {
namespace {

constexpr std::array<std::string_view, 19> kKindNames = {
    "SourceUnit",  "PragmaDirective",     "ContractDef", "FunctionDef",  "ModifierDef",
    "ModifierInvocation", "ParameterList", "Block",      "ExpressionStatement",
    "IfStatement", "RequireCall",         "Assignment",  "FunctionCall", "MemberAccess",
    "Identifier",  "Literal",             "BinaryOp",    "UnaryOp",      "Unparsed",
};

void escape_into(std::ostream& out, std::string_view value) {
    for (char c : value) {
        switch (c) {
            case '&': out << "&amp;"; break;
            case '<': out << "&lt;"; break;
            case '>': out << "&gt;"; break;
            case '"': out << "&quot;"; break;
            case '\n': out << "&#10;"; break;
            case '\r': break;
            case '\t': out << "&#9;"; break;
            default: out << c;
        }
    }
}

void dump_node(std::ostream& out, const Node& node, int depth) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << '<' << to_string(node.kind);
    for (const auto& [key, value] : node.attributes) {
        out << ' ' << key << "=\"";
        escape_into(out, value);
        out << '"';
    }
    out << " lines=\"" << node.span.first_line << '-' << node.span.last_line << '"';
    if (node.children.empty()) {
        out << "/>\n";
        return;
    }
    out << ">\n";
    for (const auto& child : node.children) {
        dump_node(out, child, depth + 1);
    }
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "</" << to_string(node.kind) << ">\n";
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept {
    return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (kKindNames[i] == name) {
            return static_cast<NodeKind>(i);
        }
    }
    return std::nullopt;
}

const std::vector<std::string_view>& known_attribute_keys() noexcept {
    static const std::vector<std::string_view> keys = {
        "abstract",  "callee",          "call_options", "declaration", "declared_type",
        "is_constructor", "keyword",    "kind",         "member",      "name",
        "object",    "operator",        "path",         "prefix",      "raw",
        "role",      "state_mutability", "target",      "type",        "unit",
        "value",     "visibility",
    };
    return keys;
}

std::string dump_xml(const Node& root) {
    std::ostringstream out;
    dump_node(out, root, 0);
    return out.str();
}

}  // namespace solscan::ir
