#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>

#include "solscan/parser.hpp"
#include "solscan/query.hpp"
#include "solscan/rules.hpp"
#include "test_support.hpp"

namespace {

using namespace solscan;
using namespace solscan::rules;
namespace t = solscan::test;
using RuleLines = std::vector<std::pair<std::string, std::size_t>>;

std::vector<Finding> run(const std::string& text, const Ruleset& ruleset) {
    const ir::SourceFile file("r.sol", text);
    return run_rules(ir::parse_source(file), file, ruleset);
}

std::vector<Finding> run_file(const t::fs::path& path, const Ruleset& ruleset) {
    const auto file = ir::SourceFile::load(path);
    return run_rules(ir::parse_source(file), file, ruleset);
}

RuleLines rule_lines(const std::vector<Finding>& findings) {
    RuleLines out;
    for (const auto& f : findings) {
        out.emplace_back(f.rule_id, f.lines.start);
    }
    return out;
}

std::string in_function(const std::string& statement) {
    return "pragma solidity ^0.4.24;\ncontract C {\n  function f() public {\n    " + statement + "\n  }\n}\n";
}

const nlohmann::json& oracle() {
    static const auto doc = nlohmann::json::parse(t::read_file(t::source_dir() / "tests/fixtures/oracle.json"));
    return doc;
}

void expect_oracle(const std::string& variant, const Ruleset& ruleset) {
    const auto& expected = oracle()["findings"][variant];
    for (const auto& path : t::corpus_files()) {
        const auto rel = t::fs::relative(path, t::corpus_dir()).generic_string();
        RuleLines want;
        if (expected.contains(rel)) {
            for (const auto& pair : expected[rel]) {
                want.emplace_back(pair[0].get<std::string>(), pair[1].get<std::size_t>());
            }
        }
        EXPECT_EQ(rule_lines(run_file(path, ruleset)), want) << variant << " " << rel;
    }
}

TEST(Rules, BaseMatchesOracle) { expect_oracle("base", base_ruleset()); }
TEST(Rules, ExtendedMatchesOracle) { expect_oracle("extended", extended_ruleset()); }

TEST(Rules, BaseIsSubsetOfExtended) {
    for (const auto& path : t::corpus_files()) {
        const auto ext = run_file(path, extended_ruleset());
        for (const auto& f : run_file(path, base_ruleset())) {
            EXPECT_NE(std::find(ext.begin(), ext.end(), f), ext.end()) << path << ":" << f.lines.start;
        }
    }
}

TEST(Rules, EachRandomnessTriggerFiresOnce) {
    const std::vector<std::string> statements = {
        "uint x = block.number;",     "address a = block.coinbase;",    "uint d = block.difficulty;",
        "uint g = block.gaslimit;",   "bytes32 h = blockhash(1);",      "bytes32 h = block.blockhash(1);",
    };
    for (const auto& s : statements) {
        const auto found = run(in_function(s), extended_ruleset());
        ASSERT_EQ(found.size(), 1u) << s;
        EXPECT_EQ(found[0].rule_id, kBadRandomness);
        EXPECT_EQ(found[0].category, DaspCategory::BadRandomness);
        EXPECT_EQ(found[0].lines.start, 4u);
        EXPECT_TRUE(run(in_function("// " + s), extended_ruleset()).empty()) << s;
        EXPECT_TRUE(run(in_function("/* " + s + " */"), extended_ruleset()).empty()) << s;
    }
}

TEST(Rules, EachTimeTriggerFiresOnce) {
    for (const std::string s : {"uint t = now;", "uint t = block.timestamp;"}) {
        const auto found = run(in_function(s), extended_ruleset());
        ASSERT_EQ(found.size(), 1u) << s;
        EXPECT_EQ(found[0].rule_id, kExactTime);
        EXPECT_EQ(found[0].category, DaspCategory::TimeManipulation);
        EXPECT_TRUE(run(in_function("// " + s), extended_ruleset()).empty());
        // The base rule only looks at comparisons.
        EXPECT_TRUE(run(in_function(s), base_ruleset()).empty());
    }
    EXPECT_EQ(run(in_function("require(now >= start);"), base_ruleset()).size(), 1u);
    EXPECT_EQ(run(in_function("if (block.timestamp != 0) { x = 1; }"), base_ruleset()).size(), 1u);
}

TEST(Rules, StringsDoNotTrigger) {
    EXPECT_TRUE(run(in_function("emit Log(\"block.number now tx.origin\");"), extended_ruleset()).empty());
}

TEST(Rules, MemberNamedNowIsNotTime) {
    EXPECT_TRUE(run(in_function("uint t = clock.now;"), extended_ruleset()).empty());
}

TEST(Rules, TxOrigin) {
    const auto found = run(in_function("require(tx.origin == owner);"), base_ruleset());
    ASSERT_EQ(found.size(), 1u);
    EXPECT_EQ(found[0].rule_id, kTxOrigin);
    EXPECT_EQ(found[0].severity, Severity::Error);
    EXPECT_EQ(found[0].snippet, "require(tx.origin == owner);");
}

TEST(Rules, UnprotectedSelfdestruct) {
    EXPECT_EQ(run(in_function("selfdestruct(msg.sender);"), extended_ruleset()).size(), 1u);
    EXPECT_EQ(run(in_function("suicide(msg.sender);"), extended_ruleset()).size(), 1u);
    EXPECT_TRUE(run(in_function("require(msg.sender == owner); selfdestruct(owner);"), extended_ruleset()).empty());
    EXPECT_TRUE(run(in_function("require(owner == msg.sender); selfdestruct(owner);"), extended_ruleset()).empty());
    // A guard after the sensitive statement does not protect it.
    EXPECT_EQ(run(in_function("selfdestruct(owner); require(msg.sender == owner);"), extended_ruleset()).size(), 1u);
}

TEST(Rules, UnprotectedOwnerAssignment) {
    EXPECT_EQ(run(in_function("owner = msg.sender;"), extended_ruleset()).size(), 1u);
    EXPECT_EQ(run(in_function("Owner = msg.sender;"), extended_ruleset()).size(), 1u);
    EXPECT_EQ(run(in_function("admin = msg.sender;"), extended_ruleset()).size(), 1u);
    EXPECT_TRUE(run(in_function("address owner = msg.sender;"), extended_ruleset()).empty());
    EXPECT_TRUE(run(in_function("balance = 1;"), extended_ruleset()).empty());
}

TEST(Rules, ModifiersAndConstructorsProtect) {
    const std::string modded =
        "contract C {\n  function f() public onlyOwner { owner = msg.sender; }\n}\n";
    EXPECT_TRUE(run(modded, extended_ruleset()).empty());
    const std::string ctor = "contract C {\n  constructor() public { owner = msg.sender; }\n}\n";
    EXPECT_TRUE(run(ctor, extended_ruleset()).empty());
    const std::string legacy = "contract C {\n  function C() public { owner = msg.sender; }\n}\n";
    EXPECT_TRUE(run(legacy, extended_ruleset()).empty());
}

TEST(Rules, CustomAccessOptions) {
    AccessControlOptions options;
    options.owner_names = {"boss"};
    options.protective_modifiers = {"onlyBoss"};
    const auto rule = Ruleset{unprotected_rule(options)};
    EXPECT_EQ(run(in_function("boss = msg.sender;"), rule).size(), 1u);
    // "owner" stays in the list.
    EXPECT_EQ(run(in_function("owner = msg.sender;"), rule).size(), 1u);
    EXPECT_TRUE(run("contract C { function f() onlyBoss { boss = msg.sender; } }", rule).empty());
    EXPECT_EQ(run("contract C { function f() onlyOwner { boss = msg.sender; } }", rule).size(), 1u);
}

TEST(Rules, OutputIsSortedByLineThenRule) {
    const auto found = run(in_function("uint r = block.number + now;\n    address o = tx.origin;"), extended_ruleset());
    ASSERT_EQ(found.size(), 3u);
    EXPECT_EQ(found[0].rule_id, kBadRandomness);
    EXPECT_EQ(found[1].rule_id, kExactTime);
    EXPECT_EQ(found[2].rule_id, kTxOrigin);
}

TEST(Rules, EmptyRulesetRejected) {
    EXPECT_THROW((void)run("contract C {}", {}), std::invalid_argument);
}

TEST(Rules, Manifest) {
    const auto text = rules_manifest(extended_ruleset());
    for (const auto id : {kBadRandomness, kExactTime, kUnprotected, kTxOrigin}) {
        EXPECT_NE(text.find(std::string(id) + "\n  category: "), std::string::npos) << id;
    }
    EXPECT_EQ(base_ruleset().size(), 2u);
    EXPECT_EQ(extended_ruleset().size(), 4u);
}

TEST(Rules, DetectorEntryPoints) {
    const ir::SourceFile file("r.sol", in_function("x = block.number; y = now; z = tx.origin; selfdestruct(z);"));
    const auto root = ir::parse_source(file);
    EXPECT_EQ(detect_bad_randomness(root, file).size(), 1u);
    EXPECT_EQ(detect_exact_time(root, file).size(), 1u);
    EXPECT_EQ(detect_tx_origin(root, file).size(), 1u);
    EXPECT_EQ(detect_unprotected(root, file).size(), 1u);
}

// Trigger tokens found by text search must line up with finding lines, except
// those inside statements the parser leaves unparsed.
TEST(RulesProperty, TriggerTokensMatchFindingLines) {
    const std::set<std::string> tracked = {std::string(kBadRandomness), std::string(kExactTime), std::string(kTxOrigin)};
    for (const auto& path : t::corpus_files()) {
        const auto file = ir::SourceFile::load(path);
        const auto root = ir::parse_source(file);
        const auto unparsed = ir::query(root, ir::QueryPattern::compile("//Unparsed"));
        std::multiset<std::pair<std::string, std::size_t>> expected;
        for (const auto& hit : t::trigger_tokens(file.text())) {
            const bool hidden = std::any_of(unparsed.begin(), unparsed.end(), [&](const ir::Node* n) {
                return n->span.begin <= hit.offset && hit.offset < n->span.end;
            });
            if (!hidden) {
                expected.emplace(hit.rule, hit.line);
            }
        }
        std::multiset<std::pair<std::string, std::size_t>> actual;
        for (const auto& f : run_rules(root, file, extended_ruleset())) {
            if (tracked.count(f.rule_id)) {
                actual.emplace(f.rule_id, f.lines.start);
            }
        }
        EXPECT_EQ(actual, expected) << path;
    }
}

}  // namespace
