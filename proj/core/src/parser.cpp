#include "solscan/parser.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <string>

#include "lexer.hpp"

namespace solscan::ir {
namespace {

using detail::Token;
using detail::TokenKind;

// Thrown inside the parser when the current construct is outside the
// supported subset. The enclosing statement/member turns into Unparsed.
struct Backtrack {};

constexpr std::array<std::string_view, 4> kVisibility = {"public", "private", "internal", "external"};
constexpr std::array<std::string_view, 4> kMutability = {"pure", "view", "payable", "constant"};
constexpr std::array<std::string_view, 3> kDataLocation = {"memory", "storage", "calldata"};
constexpr std::array<std::string_view, 8> kVariableModifiers = {
    "public", "private", "internal", "constant", "immutable", "override", "memory", "storage"};
constexpr std::array<std::string_view, 22> kReserved = {
    "return", "emit",   "if",       "else",   "for",      "while",    "do",       "break",
    "continue", "throw", "delete",  "new",    "assembly", "try",      "catch",    "true",
    "false",  "function", "modifier", "event", "unchecked", "constructor"};
constexpr std::array<std::string_view, 11> kUnits = {
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks", "years"};

template <std::size_t N>
bool one_of(std::string_view word, const std::array<std::string_view, N>& words) {
    return std::find(words.begin(), words.end(), word) != words.end();
}

int binary_precedence(std::string_view op) {
    if (op == "||") return 1;
    if (op == "&&") return 2;
    if (op == "==" || op == "!=") return 3;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 4;
    if (op == "|") return 5;
    if (op == "^") return 6;
    if (op == "&") return 7;
    if (op == "<<" || op == ">>" || op == ">>>") return 8;
    if (op == "+" || op == "-") return 9;
    if (op == "*" || op == "/" || op == "%") return 10;
    if (op == "**") return 11;
    return 0;
}

bool is_assignment_operator(const Token& tok) {
    static constexpr std::array<std::string_view, 12> ops = {
        "=", "+=", "-=", "*=", "/=", "%=", "|=", "&=", "^=", "<<=", ">>=", ">>>="};
    return tok.kind == TokenKind::Punct && one_of(tok.text, ops);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

/// Dotted path of a simple identifier/member chain ("msg.sender"), if any.
std::optional<std::string> path_of(const Node& node) {
    if (node.kind == NodeKind::Identifier) {
        if (const auto* name = node.attribute("name")) {
            return *name;
        }
    }
    if (node.kind == NodeKind::MemberAccess) {
        if (const auto* path = node.attribute("path")) {
            return *path;
        }
    }
    return std::nullopt;
}

class Parser {
public:
    Parser(const SourceFile& file, std::vector<Token> tokens) : file_(file), toks_(std::move(tokens)) {}

    Node parse_unit() {
        Node unit{NodeKind::SourceUnit, {}, {}, span(0, file_.text().size())};
        while (!at_end()) {
            unit.children.push_back(recovering([&] { return parse_top_level(); }));
        }
        return unit;
    }

private:
    struct State {
        std::size_t pos;
        std::size_t prev_end;
    };

    const SourceFile& file_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::size_t prev_end_ = 0;

    // -- token helpers -----------------------------------------------------

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    [[nodiscard]] bool at_end() const { return peek().kind == TokenKind::End; }

    const Token& advance() {
        const Token& tok = toks_[pos_];
        if (tok.kind != TokenKind::End) {
            ++pos_;
            prev_end_ = tok.end;
        }
        return tok;
    }

    bool accept(std::string_view s) {
        if (peek().is(s)) {
            advance();
            return true;
        }
        return false;
    }

    const Token& expect(std::string_view s) {
        if (!peek().is(s)) {
            throw Backtrack{};
        }
        return advance();
    }

    const Token& expect_identifier() {
        if (peek().kind != TokenKind::Identifier || one_of(peek().text, kReserved)) {
            throw Backtrack{};
        }
        return advance();
    }

    [[nodiscard]] State save() const { return {pos_, prev_end_}; }
    void restore(State s) {
        pos_ = s.pos;
        prev_end_ = s.prev_end;
    }

    [[nodiscard]] Span span(std::size_t begin, std::size_t end) const {
        end = std::max(begin, end);
        const auto first = file_.location(begin).line;
        const auto last = end > begin ? file_.location(end - 1).line : first;
        return {begin, end, first, last};
    }

    Node make(NodeKind kind, std::size_t begin) const { return Node{kind, {}, {}, span(begin, prev_end_)}; }

    // Skips the current construct: up to and including the next `;` at depth
    // zero, or through a brace group that returns to depth zero. Never
    // consumes the `}` that closes the enclosing block.
    Node unparsed(std::size_t begin_pos) {
        pos_ = begin_pos;
        prev_end_ = begin_pos > 0 ? toks_[begin_pos - 1].end : 0;
        const std::size_t begin = peek().begin;
        int depth = 0;
        while (!at_end()) {
            const Token& tok = peek();
            if (depth == 0 && tok.is("}")) {
                break;
            }
            advance();
            if (tok.is("(") || tok.is("[") || tok.is("{")) {
                ++depth;
            } else if (tok.is(")") || tok.is("]") || tok.is("}")) {
                --depth;
                if (depth == 0 && tok.is("}")) {
                    break;
                }
            } else if (depth == 0 && tok.is(";")) {
                break;
            }
        }
        if (pos_ == begin_pos && !at_end()) {
            advance();
        }
        Node node = make(NodeKind::Unparsed, begin);
        node.attributes["raw"] = trim(std::string_view(file_.text()).substr(begin, prev_end_ - begin));
        return node;
    }

    template <typename F>
    Node recovering(F&& parse) {
        const auto saved = save();
        try {
            return parse();
        } catch (const Backtrack&) {
            restore(saved);
            return unparsed(saved.pos);
        }
    }

    void skip_balanced(std::string_view open, std::string_view close) {
        expect(open);
        int depth = 1;
        while (depth > 0) {
            if (at_end()) {
                throw Backtrack{};
            }
            const Token& tok = advance();
            if (tok.is(open)) {
                ++depth;
            } else if (tok.is(close)) {
                --depth;
            }
        }
    }

    // -- top level and contracts --------------------------------------------

    Node parse_top_level() {
        const Token& tok = peek();
        if (tok.is("pragma")) {
            return parse_pragma();
        }
        if (tok.is("contract") || tok.is("interface") || tok.is("library") ||
            (tok.is("abstract") && peek(1).is("contract"))) {
            return parse_contract();
        }
        if (tok.is("function")) {
            return parse_function({});
        }
        if (auto decl = try_declaration()) {
            return std::move(*decl);
        }
        throw Backtrack{};
    }

    Node parse_pragma() {
        const std::size_t begin = peek().begin;
        expect("pragma");
        const Token& name = advance();
        if (name.kind == TokenKind::End) {
            throw Backtrack{};
        }
        const std::size_t value_begin = name.end;
        while (!peek().is(";")) {
            if (at_end()) {
                throw Backtrack{};
            }
            advance();
        }
        const std::size_t value_end = peek().begin;
        advance();
        Node node = make(NodeKind::PragmaDirective, begin);
        node.attributes["name"] = std::string(name.text);
        node.attributes["value"] = trim(std::string_view(file_.text()).substr(value_begin, value_end - value_begin));
        return node;
    }

    Node parse_contract() {
        const std::size_t begin = peek().begin;
        Node contract{NodeKind::ContractDef, {}, {}, {}};
        if (accept("abstract")) {
            contract.attributes["abstract"] = "true";
        }
        contract.attributes["kind"] = std::string(advance().text);
        const std::string name(expect_identifier().text);
        contract.attributes["name"] = name;
        while (!peek().is("{")) {
            if (at_end() || peek().is(";") || peek().is("}")) {
                throw Backtrack{};
            }
            if (peek().is("(")) {
                skip_balanced("(", ")");
            } else {
                advance();
            }
        }
        expect("{");
        while (!peek().is("}")) {
            if (at_end()) {
                throw Backtrack{};
            }
            contract.children.push_back(recovering([&] { return parse_member(name); }));
        }
        expect("}");
        contract.span = span(begin, prev_end_);
        return contract;
    }

    Node parse_member(const std::string& contract_name) {
        const Token& tok = peek();
        if (tok.is("function") || tok.is("constructor")) {
            return parse_function(contract_name);
        }
        if (tok.is("modifier")) {
            return parse_modifier_def();
        }
        // receive/fallback, events, structs, enums, using-for, errors.
        if (tok.kind == TokenKind::Identifier &&
            (tok.is("receive") || tok.is("fallback") || tok.is("event") || tok.is("struct") ||
             tok.is("enum") || tok.is("using") || tok.is("error"))) {
            throw Backtrack{};
        }
        if (auto decl = try_declaration()) {
            return std::move(*decl);
        }
        throw Backtrack{};
    }

    Node parse_parameter_list(std::string_view role) {
        const std::size_t begin = peek().begin;
        expect("(");
        Node list{NodeKind::ParameterList, {}, {}, {}};
        list.attributes["role"] = std::string(role);
        std::vector<const Token*> current;
        auto flush = [&] {
            if (current.size() >= 2) {
                const Token* last = current.back();
                if (last->kind == TokenKind::Identifier && !one_of(last->text, kDataLocation) &&
                    !last->is("payable") && !last->is("indexed")) {
                    Node param{NodeKind::Identifier, {}, {}, {}};
                    param.attributes["name"] = std::string(last->text);
                    const std::size_t type_end = current[current.size() - 2]->end;
                    param.attributes["type"] = std::string(
                        std::string_view(file_.text()).substr(current.front()->begin, type_end - current.front()->begin));
                    param.span = span(current.front()->begin, last->end);
                    list.children.push_back(std::move(param));
                }
            }
            current.clear();
        };
        int depth = 0;
        while (depth > 0 || !peek().is(")")) {
            if (at_end()) {
                throw Backtrack{};
            }
            const Token& tok = advance();
            if (tok.is("(") || tok.is("[")) {
                ++depth;
            } else if (tok.is(")") || tok.is("]")) {
                --depth;
            }
            if (depth == 0 && tok.is(",")) {
                flush();
            } else {
                current.push_back(&tok);
            }
        }
        flush();
        expect(")");
        list.span = span(begin, prev_end_);
        return list;
    }

    Node parse_modifier_invocation() {
        const std::size_t begin = peek().begin;
        std::string name(expect_identifier().text);
        while (peek().is(".") && peek(1).kind == TokenKind::Identifier) {
            advance();
            name += ".";
            name += advance().text;
        }
        Node inv{NodeKind::ModifierInvocation, {}, {}, {}};
        inv.attributes["name"] = name;
        if (peek().is("(")) {
            inv.children = parse_arguments();
        }
        inv.span = span(begin, prev_end_);
        return inv;
    }

    Node parse_function(const std::string& contract_name) {
        const std::size_t begin = peek().begin;
        Node fn{NodeKind::FunctionDef, {}, {}, {}};
        if (accept("constructor")) {
            fn.attributes["name"] = "constructor";
            fn.attributes["kind"] = "constructor";
            fn.attributes["is_constructor"] = "true";
        } else {
            expect("function");
            std::string name;
            if (peek().kind == TokenKind::Identifier) {
                name = std::string(expect_identifier().text);
            }
            const bool legacy_constructor = !name.empty() && name == contract_name;
            if (!name.empty()) {
                fn.attributes["name"] = name;
            }
            fn.attributes["kind"] = name.empty() ? "fallback" : (legacy_constructor ? "constructor" : "function");
            fn.attributes["is_constructor"] = legacy_constructor ? "true" : "false";
        }
        fn.children.push_back(parse_parameter_list("parameters"));
        while (!peek().is("{") && !peek().is(";")) {
            const Token& tok = peek();
            if (tok.kind != TokenKind::Identifier) {
                throw Backtrack{};
            }
            if (one_of(tok.text, kVisibility)) {
                fn.attributes["visibility"] = std::string(advance().text);
            } else if (one_of(tok.text, kMutability)) {
                fn.attributes["state_mutability"] = std::string(advance().text);
            } else if (tok.is("virtual")) {
                advance();
            } else if (tok.is("override")) {
                advance();
                if (peek().is("(")) {
                    skip_balanced("(", ")");
                }
            } else if (tok.is("returns")) {
                advance();
                fn.children.push_back(parse_parameter_list("returns"));
            } else {
                fn.children.push_back(parse_modifier_invocation());
            }
        }
        if (!accept(";")) {
            fn.children.push_back(parse_block());
        }
        fn.span = span(begin, prev_end_);
        return fn;
    }

    Node parse_modifier_def() {
        const std::size_t begin = peek().begin;
        expect("modifier");
        Node mod{NodeKind::ModifierDef, {}, {}, {}};
        mod.attributes["name"] = std::string(expect_identifier().text);
        if (peek().is("(")) {
            mod.children.push_back(parse_parameter_list("parameters"));
        }
        while (peek().is("virtual") || peek().is("override")) {
            advance();
            if (peek().is("(")) {
                skip_balanced("(", ")");
            }
        }
        if (!accept(";")) {
            mod.children.push_back(parse_block());
        }
        mod.span = span(begin, prev_end_);
        return mod;
    }

    // -- declarations ---------------------------------------------------------

    bool parse_type_name(std::string& out) {
        const std::size_t begin = peek().begin;
        if (peek().is("mapping")) {
            advance();
            skip_balanced("(", ")");
        } else {
            if (peek().kind != TokenKind::Identifier || one_of(peek().text, kReserved)) {
                return false;
            }
            advance();
            while (peek().is(".") && peek(1).kind == TokenKind::Identifier) {
                advance();
                advance();
            }
        }
        while (peek().is("[")) {
            skip_balanced("[", "]");
        }
        accept("payable");
        out = std::string(std::string_view(file_.text()).substr(begin, prev_end_ - begin));
        return true;
    }

    /// `Type [location|visibility...] name [= expr];`. Declarations with an
    /// initializer become Assignment nodes; bare declarations are Unparsed.
    std::optional<Node> try_declaration() {
        const auto saved = save();
        const std::size_t begin = peek().begin;
        std::string type;
        try {
            if (!parse_type_name(type)) {
                restore(saved);
                return std::nullopt;
            }
        } catch (const Backtrack&) {
            restore(saved);
            return std::nullopt;
        }
        std::string visibility;
        while (peek().kind == TokenKind::Identifier && one_of(peek().text, kVariableModifiers)) {
            const Token& mod = advance();
            if (one_of(mod.text, kVisibility)) {
                visibility = std::string(mod.text);
            }
            if (mod.is("override") && peek().is("(")) {
                skip_balanced("(", ")");
            }
        }
        if (peek().kind != TokenKind::Identifier || one_of(peek().text, kReserved) ||
            !(peek(1).is("=") || peek(1).is(";"))) {
            restore(saved);
            return std::nullopt;
        }
        const Token& name_tok = advance();
        if (accept(";")) {
            return unparsed(saved.pos);
        }
        expect("=");
        Node target{NodeKind::Identifier, {{"name", std::string(name_tok.text)}}, {}, span(name_tok.begin, name_tok.end)};
        Node rhs = parse_expression();
        expect(";");
        Node assign = make(NodeKind::Assignment, begin);
        assign.attributes["operator"] = "=";
        assign.attributes["target"] = std::string(name_tok.text);
        assign.attributes["declared_type"] = type;
        assign.attributes["declaration"] = "true";
        if (!visibility.empty()) {
            assign.attributes["visibility"] = visibility;
        }
        assign.children.push_back(std::move(target));
        assign.children.push_back(std::move(rhs));
        return assign;
    }

    // -- statements -----------------------------------------------------------

    Node parse_block() {
        const std::size_t begin = peek().begin;
        expect("{");
        Node block{NodeKind::Block, {}, {}, {}};
        while (!peek().is("}")) {
            if (at_end()) {
                throw Backtrack{};
            }
            block.children.push_back(recovering([&] { return parse_statement(); }));
        }
        expect("}");
        block.span = span(begin, prev_end_);
        return block;
    }

    Node parse_statement() {
        const Token& tok = peek();
        const std::size_t begin = tok.begin;
        if (tok.is("{")) {
            return parse_block();
        }
        if (tok.is("if")) {
            return parse_if();
        }
        if (tok.is("unchecked") && peek(1).is("{")) {
            advance();
            Node block = parse_block();
            block.attributes["kind"] = "unchecked";
            block.span = span(begin, prev_end_);
            return block;
        }
        if (tok.is("return") || tok.is("emit") || tok.is("throw") || tok.is("break") || tok.is("continue")) {
            const std::string keyword(advance().text);
            Node stmt{NodeKind::ExpressionStatement, {}, {}, {}};
            stmt.attributes["keyword"] = keyword;
            if (!peek().is(";")) {
                if (keyword != "return" && keyword != "emit") {
                    throw Backtrack{};
                }
                stmt.children.push_back(parse_expression());
            }
            expect(";");
            stmt.span = span(begin, prev_end_);
            return stmt;
        }
        if (tok.is("for") || tok.is("while") || tok.is("do") || tok.is("assembly") || tok.is("try")) {
            throw Backtrack{};
        }
        if (auto decl = try_declaration()) {
            return std::move(*decl);
        }
        Node stmt{NodeKind::ExpressionStatement, {}, {}, {}};
        stmt.children.push_back(parse_expression());
        expect(";");
        stmt.span = span(begin, prev_end_);
        return stmt;
    }

    Node parse_if() {
        const std::size_t begin = peek().begin;
        expect("if");
        expect("(");
        Node node{NodeKind::IfStatement, {}, {}, {}};
        node.children.push_back(parse_expression());
        expect(")");
        node.children.push_back(recovering([&] { return parse_statement(); }));
        if (accept("else")) {
            node.children.push_back(recovering([&] { return parse_statement(); }));
        }
        node.span = span(begin, prev_end_);
        return node;
    }

    // -- expressions ----------------------------------------------------------

    Node parse_expression() { return parse_assignment(); }

    Node parse_assignment() {
        const std::size_t begin = peek().begin;
        Node lhs = parse_ternary();
        if (!is_assignment_operator(peek())) {
            return lhs;
        }
        const std::string op(advance().text);
        Node rhs = parse_assignment();
        Node assign = make(NodeKind::Assignment, begin);
        assign.attributes["operator"] = op;
        if (lhs.kind == NodeKind::Identifier) {
            assign.attributes["target"] = lhs.attribute_or("name");
        } else if (lhs.kind == NodeKind::MemberAccess) {
            assign.attributes["target"] = lhs.attribute_or("member");
        } else if (lhs.kind == NodeKind::BinaryOp && lhs.attribute_or("operator") == "[]" && !lhs.children.empty()) {
            if (auto base = path_of(lhs.children.front())) {
                assign.attributes["target"] = *base;
            }
        }
        assign.children.push_back(std::move(lhs));
        assign.children.push_back(std::move(rhs));
        return assign;
    }

    Node parse_ternary() {
        const std::size_t begin = peek().begin;
        Node cond = parse_binary(1);
        if (!accept("?")) {
            return cond;
        }
        Node yes = parse_assignment();
        expect(":");
        Node no = parse_assignment();
        Node node = make(NodeKind::BinaryOp, begin);
        node.attributes["operator"] = "?:";
        node.children.push_back(std::move(cond));
        node.children.push_back(std::move(yes));
        node.children.push_back(std::move(no));
        return node;
    }

    Node parse_binary(int min_precedence) {
        const std::size_t begin = peek().begin;
        Node left = parse_unary();
        while (true) {
            const Token& tok = peek();
            if (tok.kind != TokenKind::Punct) {
                break;
            }
            const int prec = binary_precedence(tok.text);
            if (prec == 0 || prec < min_precedence) {
                break;
            }
            const std::string op(advance().text);
            // `**` is right-associative.
            Node right = parse_binary(op == "**" ? prec : prec + 1);
            Node node = make(NodeKind::BinaryOp, begin);
            node.attributes["operator"] = op;
            node.children.push_back(std::move(left));
            node.children.push_back(std::move(right));
            left = std::move(node);
        }
        return left;
    }

    Node parse_unary() {
        const Token& tok = peek();
        const std::size_t begin = tok.begin;
        if (tok.is("!") || tok.is("-") || tok.is("~") || tok.is("++") || tok.is("--") || tok.is("+") ||
            tok.is("delete")) {
            const std::string op(advance().text);
            Node operand = parse_unary();
            Node node = make(NodeKind::UnaryOp, begin);
            node.attributes["operator"] = op;
            node.attributes["prefix"] = "true";
            node.children.push_back(std::move(operand));
            return node;
        }
        return parse_postfix(parse_primary(), begin);
    }

    std::vector<Node> parse_arguments() {
        expect("(");
        std::vector<Node> args;
        if (peek().is("{")) {
            args = parse_named_arguments();
        } else {
            while (!peek().is(")")) {
                args.push_back(parse_expression());
                if (!accept(",")) {
                    break;
                }
            }
        }
        expect(")");
        return args;
    }

    std::vector<Node> parse_named_arguments() {
        expect("{");
        std::vector<Node> values;
        while (!peek().is("}")) {
            expect_identifier();
            expect(":");
            values.push_back(parse_expression());
            if (!accept(",")) {
                break;
            }
        }
        expect("}");
        return values;
    }

    Node parse_postfix(Node base, std::size_t begin) {
        std::vector<Node> call_options;
        while (true) {
            const Token& tok = peek();
            if (tok.is(".")) {
                advance();
                const Token& member = advance();
                if (member.kind != TokenKind::Identifier) {
                    throw Backtrack{};
                }
                Node node = make(NodeKind::MemberAccess, begin);
                node.attributes["member"] = std::string(member.text);
                if (base.kind == NodeKind::Identifier) {
                    node.attributes["object"] = base.attribute_or("name");
                }
                if (auto path = path_of(base)) {
                    node.attributes["path"] = *path + "." + std::string(member.text);
                }
                node.children.push_back(std::move(base));
                base = std::move(node);
            } else if (tok.is("(")) {
                const auto callee = path_of(base);
                std::vector<Node> args = parse_arguments();
                for (auto& opt : call_options) {
                    args.push_back(std::move(opt));
                }
                call_options.clear();
                if (base.kind == NodeKind::Identifier && callee == "require") {
                    Node node = make(NodeKind::RequireCall, begin);
                    node.attributes["callee"] = "require";
                    node.children = std::move(args);
                    base = std::move(node);
                    continue;
                }
                Node node = make(NodeKind::FunctionCall, begin);
                if (callee) {
                    node.attributes["callee"] = *callee;
                }
                node.children.push_back(std::move(base));
                for (auto& arg : args) {
                    node.children.push_back(std::move(arg));
                }
                base = std::move(node);
            } else if (tok.is("{") && peek(1).kind == TokenKind::Identifier && peek(2).is(":")) {
                call_options = parse_named_arguments();
            } else if (tok.is("[")) {
                advance();
                Node node{NodeKind::BinaryOp, {}, {}, {}};
                node.attributes["operator"] = "[]";
                node.children.push_back(std::move(base));
                if (!peek().is("]") && !peek().is(":")) {
                    node.children.push_back(parse_expression());
                }
                if (accept(":") && !peek().is("]")) {
                    node.children.push_back(parse_expression());
                }
                expect("]");
                node.span = span(begin, prev_end_);
                base = std::move(node);
            } else if (tok.is("++") || tok.is("--")) {
                const std::string op(advance().text);
                Node node = make(NodeKind::UnaryOp, begin);
                node.attributes["operator"] = op;
                node.attributes["prefix"] = "false";
                node.children.push_back(std::move(base));
                base = std::move(node);
            } else {
                break;
            }
        }
        return base;
    }

    Node parse_primary() {
        const Token& tok = peek();
        const std::size_t begin = tok.begin;
        switch (tok.kind) {
            case TokenKind::Number: {
                std::string value(advance().text);
                Node lit{NodeKind::Literal, {}, {}, {}};
                lit.attributes["type"] = "number";
                if (peek().kind == TokenKind::Identifier && one_of(peek().text, kUnits)) {
                    lit.attributes["unit"] = std::string(advance().text);
                }
                lit.attributes["value"] = value;
                lit.span = span(begin, prev_end_);
                return lit;
            }
            case TokenKind::String: {
                Node lit{NodeKind::Literal, {{"type", "string"}, {"value", std::string(advance().text)}}, {}, {}};
                lit.span = span(begin, prev_end_);
                return lit;
            }
            case TokenKind::Identifier: {
                if (tok.is("true") || tok.is("false")) {
                    Node lit{NodeKind::Literal, {{"type", "bool"}, {"value", std::string(advance().text)}}, {}, {}};
                    lit.span = span(begin, prev_end_);
                    return lit;
                }
                if (tok.is("new")) {
                    advance();
                    std::string type;
                    if (!parse_type_name(type)) {
                        throw Backtrack{};
                    }
                    Node node = make(NodeKind::UnaryOp, begin);
                    node.attributes["operator"] = "new";
                    node.attributes["type"] = type;
                    return node;
                }
                const Token& name = expect_identifier();
                return Node{NodeKind::Identifier, {{"name", std::string(name.text)}}, {}, span(name.begin, name.end)};
            }
            case TokenKind::Punct: {
                if (tok.is("(")) {
                    advance();
                    std::vector<Node> items;
                    bool tuple = false;
                    while (!peek().is(")")) {
                        if (peek().is(",")) {
                            advance();
                            tuple = true;
                            continue;
                        }
                        items.push_back(parse_expression());
                        if (accept(",")) {
                            tuple = true;
                        } else {
                            break;
                        }
                    }
                    expect(")");
                    if (!tuple && items.size() == 1) {
                        return std::move(items.front());
                    }
                    Node node = make(NodeKind::BinaryOp, begin);
                    node.attributes["operator"] = "tuple";
                    node.children = std::move(items);
                    return node;
                }
                if (tok.is("[")) {
                    advance();
                    Node node{NodeKind::BinaryOp, {{"operator", "array"}}, {}, {}};
                    while (!peek().is("]")) {
                        node.children.push_back(parse_expression());
                        if (!accept(",")) {
                            break;
                        }
                    }
                    expect("]");
                    node.span = span(begin, prev_end_);
                    return node;
                }
                throw Backtrack{};
            }
            case TokenKind::End:
                break;
        }
        throw Backtrack{};
    }
};

}  // namespace

Node parse_source(const SourceFile& file) {
    auto tokens = detail::tokenize(file);
    detail::check_balance(file, tokens);
    Parser parser(file, std::move(tokens));
    return parser.parse_unit();
}

}  // namespace solscan::ir
