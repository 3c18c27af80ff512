#include <gtest/gtest.h>

#include <functional>

#include "solscan/error.hpp"
#include "solscan/parser.hpp"
#include "solscan/query.hpp"
#include "test_support.hpp"

namespace {

using namespace solscan::ir;
using solscan::ParseError;
namespace t = solscan::test;

Node parse(const std::string& text) { return parse_source(SourceFile("t.sol", text)); }

std::vector<const Node*> find(const Node& root, const std::string& pattern) {
    return query(root, QueryPattern::compile(pattern));
}

void visit(const Node& node, const std::function<void(const Node&, const Node*)>& fn, const Node* parent = nullptr) {
    fn(node, parent);
    for (const auto& child : node.children) {
        visit(child, fn, &node);
    }
}

TEST(Parser, ContractAndFunctionStructure) {
    const auto root = parse("pragma solidity ^0.5.0;\ncontract A is B {\n  function f(uint x) public view returns (uint) {\n    return x;\n  }\n}\n");
    ASSERT_EQ(root.kind, NodeKind::SourceUnit);
    ASSERT_EQ(root.children.size(), 2u);
    EXPECT_EQ(root.children[0].kind, NodeKind::PragmaDirective);
    EXPECT_EQ(root.children[0].attribute_or("value"), "^0.5.0");
    const auto& contract = root.children[1];
    EXPECT_EQ(contract.kind, NodeKind::ContractDef);
    EXPECT_EQ(contract.attribute_or("name"), "A");
    const auto fns = find(root, "//FunctionDef");
    ASSERT_EQ(fns.size(), 1u);
    EXPECT_EQ(fns[0]->attribute_or("name"), "f");
    EXPECT_EQ(fns[0]->attribute_or("visibility"), "public");
    EXPECT_EQ(fns[0]->attribute_or("state_mutability"), "view");
    EXPECT_EQ(fns[0]->span.first_line, 3u);
    EXPECT_EQ(fns[0]->span.last_line, 5u);
}

TEST(Parser, ConstructorForms) {
    const auto root = parse(
        "contract Old { function Old() { } function other() { } }\n"
        "contract New { constructor() public { } }\n");
    const auto ctors = find(root, "//FunctionDef[@is_constructor='true']");
    ASSERT_EQ(ctors.size(), 2u);
    EXPECT_EQ(ctors[0]->attribute_or("name"), "Old");
    EXPECT_EQ(ctors[1]->attribute_or("name"), "constructor");
    EXPECT_EQ(find(root, "//FunctionDef[@is_constructor='false']").size(), 1u);
}

TEST(Parser, MemberAccessAndCalls) {
    const auto root = parse("contract A { function f() { x = block.number; y = a.b.c(1, 2); } }");
    const auto members = find(root, "//MemberAccess[@path='block.number']");
    ASSERT_EQ(members.size(), 1u);
    EXPECT_EQ(members[0]->attribute_or("object"), "block");
    EXPECT_EQ(members[0]->attribute_or("member"), "number");
    const auto calls = find(root, "//FunctionCall[@callee='a.b.c']");
    ASSERT_EQ(calls.size(), 1u);
}

TEST(Parser, RequireAndModifiers) {
    const auto root = parse("contract A { function f() public onlyOwner { require(msg.sender == owner, \"no\"); } }");
    EXPECT_EQ(find(root, "//FunctionDef/ModifierInvocation[@name='onlyOwner']").size(), 1u);
    EXPECT_EQ(find(root, "//RequireCall//BinaryOp[@operator='==']").size(), 1u);
}

TEST(Parser, DeclarationWithInitializerIsAssignment) {
    const auto root = parse("contract A { function f() { uint256 owner = 1; owner = 2; } }");
    EXPECT_EQ(find(root, "//Assignment[@declaration='true'][@target='owner']").size(), 1u);
    EXPECT_EQ(find(root, "//Assignment[@declaration!='true'][@target='owner']").size(), 1u);
}

TEST(Parser, LoopsBecomeUnparsed) {
    const auto root = parse("contract A { function f() { for (uint i = 0; i < 3; i++) { x = now; } } }");
    EXPECT_GE(find(root, "//Unparsed").size(), 1u);
    EXPECT_TRUE(find(root, "//Identifier[@name='now']").empty());
}

TEST(Parser, NewerFunctionHeadersBecomeUnparsed) {
    const auto root = parse("contract A {\n  receive() external payable { x = now; }\n  fallback() external { }\n}\n");
    const auto unparsed = find(root, "/SourceUnit/ContractDef/Unparsed");
    ASSERT_EQ(unparsed.size(), 2u);
    EXPECT_EQ(unparsed[0]->span.first_line, 2u);
    EXPECT_TRUE(find(root, "//FunctionDef").empty());
}

TEST(Parser, ElseIfChains) {
    const auto root = parse("contract A { function f() { if (a) { x(); } else if (b) { y(); } else { z(); } } }");
    EXPECT_EQ(find(root, "//IfStatement").size(), 2u);
    EXPECT_EQ(find(root, "//FunctionCall").size(), 3u);
}

TEST(Parser, MalformedInputRaisesParseError) {
    EXPECT_THROW(parse("contract A {"), ParseError);
    EXPECT_THROW(parse("contract A { function f() { x = (1; } }"), ParseError);
    EXPECT_THROW(parse("contract A { /* "), ParseError);
    EXPECT_THROW(parse("contract A { string s = \"x; }"), ParseError);
}

TEST(Parser, EmptyAndCommentOnlyFiles) {
    EXPECT_TRUE(parse("").children.empty());
    EXPECT_TRUE(parse("// nothing here\n/* at all */").children.empty());
}

TEST(Parser, ChildSpansNestInsideParents) {
    for (const auto& path : t::corpus_files()) {
        const auto root = parse_source(SourceFile::load(path));
        visit(root, [&](const Node& node, const Node* parent) {
            if (parent) {
                EXPECT_TRUE(parent->span.contains(node.span)) << path << " " << to_string(node.kind);
            }
            EXPECT_LE(node.span.begin, node.span.end);
        });
    }
}

TEST(Parser, SpanLinesMatchByteOffsets) {
    for (const auto& path : t::corpus_files()) {
        const auto file = SourceFile::load(path);
        const auto root = parse_source(file);
        visit(root, [&](const Node& node, const Node*) {
            if (node.kind == NodeKind::SourceUnit || node.span.end == node.span.begin) {
                return;
            }
            EXPECT_EQ(node.span.first_line, file.location(node.span.begin).line) << path;
            EXPECT_EQ(node.span.last_line, file.location(node.span.end - 1).line) << path;
        });
    }
}

TEST(Parser, DumpIsDeterministic) {
    for (const auto& path : t::corpus_files()) {
        const auto file = SourceFile::load(path);
        EXPECT_EQ(dump_xml(parse_source(file)), dump_xml(parse_source(file))) << path;
    }
}

TEST(Parser, DumpFormat) {
    const auto root = parse("contract A { }");
    EXPECT_EQ(dump_xml(root), "<SourceUnit lines=\"1-1\">\n  <ContractDef kind=\"contract\" name=\"A\" lines=\"1-1\"/>\n</SourceUnit>\n");
}

// Property: balanced token soup never throws, and arbitrary byte mutations of
// real contracts either parse or raise ParseError (never anything else).
TEST(ParserProperty, RobustAgainstMutations) {
    const auto files = t::corpus_files();
    std::uniform_int_distribution<int> byte(0, 255);
    for (int round = 0; round < 300; ++round) {
        auto text = t::read_file(files[static_cast<std::size_t>(round) % files.size()]);
        const int edits = 1 + round % 5;
        for (int e = 0; e < edits; ++e) {
            std::uniform_int_distribution<std::size_t> pos(0, text.size() - 1);
            text[pos(t::rng())] = static_cast<char>(byte(t::rng()));
        }
        try {
            (void)parse(text);
        } catch (const ParseError&) {
        }
    }
}

TEST(ParserProperty, BalancedSoupAlwaysParses) {
    const std::vector<std::string> atoms = {"contract", "function", "A", "x", "=", "+", "now", "block", ".", "number",
                                            ";", ",", "1", "\"s\"", "require", "if", "else", "return", "emit",
                                            "public", "modifier", "mapping", "=>", "!", "?", ":"};
    std::uniform_int_distribution<std::size_t> pick(0, atoms.size() + 2);
    for (int round = 0; round < 300; ++round) {
        std::string text;
        std::vector<char> open;
        for (int i = 0; i < 60; ++i) {
            const auto k = pick(t::rng());
            if (k == atoms.size()) {
                const char c = "({["[t::rng()() % 3];
                open.push_back(c == '(' ? ')' : c == '{' ? '}' : ']');
                text += c;
            } else if (k == atoms.size() + 1 && !open.empty()) {
                text += open.back();
                open.pop_back();
            } else if (k < atoms.size()) {
                text += atoms[k];
            }
            text += ' ';
        }
        while (!open.empty()) {
            text += open.back();
            open.pop_back();
        }
        EXPECT_NO_THROW((void)parse(text)) << text;
    }
}

}  // namespace
