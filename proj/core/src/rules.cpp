#include "solscan/rules.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace solscan::rules {
namespace {

using ir::Node;
using ir::QueryPattern;
using ir::SourceFile;

constexpr std::string_view kComparisons =
    "@operator='<' or @operator='>' or @operator='<=' or @operator='>=' or @operator='==' or @operator='!='";

std::string quote(std::string_view value) { return "'" + std::string(value) + "'"; }

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// "@key='a' or @key='b'", optionally through lower-case().
std::string any_of_values(std::string_view key, const std::vector<std::string>& values, bool ignore_case) {
    std::string out;
    for (const auto& value : values) {
        if (!out.empty()) {
            out += " or ";
        }
        out += ignore_case ? "lower-case(@" + std::string(key) + ")=" + quote(lower(value))
                           : "@" + std::string(key) + "=" + quote(value);
    }
    return out;
}

std::string trimmed_line(const SourceFile& file, std::size_t line) {
    auto text = file.line_text(line);
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = text.find_last_not_of(" \t");
    return std::string(text.substr(first, last - first + 1));
}

Finding make_finding(const Rule& rule, const Node& node, const SourceFile& file) {
    Finding f;
    f.rule_id = rule.id;
    f.category = rule.category;
    f.contract_path = file.path().generic_string();
    f.lines = {node.span.first_line, node.span.last_line};
    f.snippet = trimmed_line(file, node.span.first_line);
    f.message = rule.description;
    f.severity = rule.severity;
    return f;
}

/// One finding per node matched by any of the rule's patterns.
std::vector<Finding> evaluate_patterns(const Rule& rule, const Node& root, const SourceFile& file) {
    std::vector<const Node*> hits;
    for (const auto& pattern : rule.patterns) {
        for (const Node* node : ir::query(root, pattern)) {
            if (std::find(hits.begin(), hits.end(), node) == hits.end()) {
                hits.push_back(node);
            }
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Node* a, const Node* b) { return a->span.begin < b->span.begin; });
    std::vector<Finding> out;
    out.reserve(hits.size());
    for (const Node* node : hits) {
        out.push_back(make_finding(rule, *node, file));
    }
    return out;
}

}  // namespace

Rule bad_randomness_rule() {
    Rule rule;
    rule.id = kBadRandomness;
    rule.category = DaspCategory::BadRandomness;
    rule.severity = Severity::Warning;
    rule.description = "Block attribute used as a source of randomness can be influenced by miners";
    rule.patterns = {
        QueryPattern::compile("//MemberAccess[@object='block'][@member='number' or @member='coinbase' or "
                              "@member='difficulty' or @member='gaslimit' or @member='blockhash']"),
        QueryPattern::compile("//FunctionCall[@callee='blockhash']"),
    };
    rule.evaluate = evaluate_patterns;
    return rule;
}

Rule exact_time_rule(bool general) {
    Rule rule;
    rule.id = kExactTime;
    rule.category = DaspCategory::TimeManipulation;
    rule.severity = Severity::Warning;
    // Same message for both variants so that base findings are a subset of extended ones.
    rule.description = "Block timestamp can be manipulated by miners";
    if (general) {
        rule.patterns = {
            QueryPattern::compile("//MemberAccess[@object='block'][@member='timestamp']"),
            QueryPattern::compile("//Identifier[@name='now']"),
        };
    } else {
        const std::string comparison = "//BinaryOp[" + std::string(kComparisons) + "]";
        rule.patterns = {
            QueryPattern::compile(comparison + "/MemberAccess[@object='block'][@member='timestamp']"),
            QueryPattern::compile(comparison + "/Identifier[@name='now']"),
        };
    }
    rule.evaluate = evaluate_patterns;
    return rule;
}

Rule tx_origin_rule() {
    Rule rule;
    rule.id = kTxOrigin;
    rule.category = DaspCategory::AccessControl;
    rule.severity = Severity::Error;
    rule.description = "tx.origin used for authorization";
    rule.patterns = {QueryPattern::compile("//MemberAccess[@object='tx'][@member='origin']")};
    rule.evaluate = evaluate_patterns;
    return rule;
}

// patterns[0]: functions without a protective modifier
// patterns[1]: selfdestruct/suicide calls
// patterns[2]: assignments to an owner-like variable
// patterns[3]: require(msg.sender ==/!= owner) guards; a guard protects the
//              statements that follow it in the same function
Rule unprotected_rule(const AccessControlOptions& options) {
    auto owners = options.owner_names;
    if (std::none_of(owners.begin(), owners.end(), [](const auto& n) { return lower(n) == "owner"; })) {
        owners.insert(owners.begin(), "owner");
    }
    const std::string owner_test = any_of_values("target", owners, true);
    const std::string owner_operand = "./Identifier[" + any_of_values("name", owners, true) + "] or ./FunctionCall[" +
                                      any_of_values("callee", owners, true) + "]";

    std::string candidates = "//FunctionDef[@is_constructor='false']";
    if (!options.protective_modifiers.empty()) {
        candidates += "[not(./ModifierInvocation[" + any_of_values("name", options.protective_modifiers, false) + "])]";
    }

    Rule rule;
    rule.id = kUnprotected;
    rule.category = DaspCategory::AccessControl;
    rule.severity = Severity::Error;
    rule.description = "Sensitive operation (selfdestruct or ownership change) without access protection";
    rule.patterns = {
        QueryPattern::compile(candidates),
        QueryPattern::compile("//FunctionCall[@callee='selfdestruct' or @callee='suicide']"),
        QueryPattern::compile("//Assignment[@declaration!='true'][" + owner_test + "]"),
        QueryPattern::compile(
            "//RequireCall[.//BinaryOp[@operator='==' or @operator='!='][./MemberAccess[@path='msg.sender']][" +
            owner_operand + "]]"),
    };

    rule.evaluate = [](const Rule& self, const Node& root, const SourceFile& file) {
        std::vector<Finding> out;
        for (const Node* fn : ir::query(root, self.patterns[0])) {
            const auto guards = ir::query(*fn, self.patterns[3]);
            auto guarded = [&](const Node& stmt) {
                return std::any_of(guards.begin(), guards.end(),
                                   [&](const Node* g) { return g->span.end <= stmt.span.begin; });
            };
            std::vector<const Node*> sensitive = ir::query(*fn, self.patterns[1]);
            for (const Node* n : ir::query(*fn, self.patterns[2])) {
                sensitive.push_back(n);
            }
            std::sort(sensitive.begin(), sensitive.end(),
                      [](const Node* a, const Node* b) { return a->span.begin < b->span.begin; });
            for (const Node* stmt : sensitive) {
                if (!guarded(*stmt)) {
                    out.push_back(make_finding(self, *stmt, file));
                }
            }
        }
        return out;
    };
    return rule;
}

Ruleset base_ruleset() { return {tx_origin_rule(), exact_time_rule(false)}; }

Ruleset extended_ruleset(const AccessControlOptions& options) {
    return {tx_origin_rule(), exact_time_rule(true), bad_randomness_rule(), unprotected_rule(options)};
}

std::vector<Finding> detect_bad_randomness(const Node& root, const SourceFile& file) {
    const auto rule = bad_randomness_rule();
    return rule.evaluate(rule, root, file);
}

std::vector<Finding> detect_exact_time(const Node& root, const SourceFile& file) {
    const auto rule = exact_time_rule(true);
    return rule.evaluate(rule, root, file);
}

std::vector<Finding> detect_unprotected(const Node& root, const SourceFile& file, const AccessControlOptions& options) {
    const auto rule = unprotected_rule(options);
    return rule.evaluate(rule, root, file);
}

std::vector<Finding> detect_tx_origin(const Node& root, const SourceFile& file) {
    const auto rule = tx_origin_rule();
    return rule.evaluate(rule, root, file);
}

std::vector<Finding> run_rules(const Node& root, const SourceFile& file, const Ruleset& ruleset) {
    if (ruleset.empty()) {
        throw std::invalid_argument("run_rules: empty ruleset");
    }
    std::vector<Finding> out;
    for (const auto& rule : ruleset) {
        auto found = rule.evaluate(rule, root, file);
        out.insert(out.end(), std::make_move_iterator(found.begin()), std::make_move_iterator(found.end()));
    }
    std::stable_sort(out.begin(), out.end(), [](const Finding& a, const Finding& b) {
        return std::tie(a.lines.start, a.rule_id) < std::tie(b.lines.start, b.rule_id);
    });
    return out;
}

std::string rules_manifest(const Ruleset& ruleset) {
    std::ostringstream out;
    for (const auto& rule : ruleset) {
        out << rule.id << '\n'
            << "  category: " << to_string(rule.category) << '\n'
            << "  severity: " << to_string(rule.severity) << '\n'
            << "  description: " << rule.description << '\n'
            << "  patterns:\n";
        for (const auto& pattern : rule.patterns) {
            out << "    - " << pattern.text << '\n';
        }
    }
    return out.str();
}

}  // namespace solscan::rules
