#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "solscan/ir.hpp"

namespace solscan::ir {

struct QueryPattern;

enum class Axis { Descendant, Child };

/// One atomic test inside a predicate bracket.
struct AttributeTest {
    enum class Op {
        Equals,           // @k='v'
        NotEquals,        // @k!='v'  (true when the attribute is absent)
        Contains,         // contains(@k,'v')
        EqualsIgnoreCase, // lower-case(@k)='v'
        Exists,           // @k
    };
    Op op = Op::Equals;
    std::string key;
    std::string value;
};

/// A bracketed predicate. Satisfied when any of its alternatives holds
/// (alternatives are joined by `or`). An alternative is either an attribute
/// test or a nested sub-pattern that must match at least one node below the
/// candidate.
struct Predicate {
    struct Alternative {
        std::vector<AttributeTest> tests;  // all must hold (joined by `and`)
        std::shared_ptr<const QueryPattern> exists;
    };
    std::vector<Alternative> alternatives;
};

struct Step {
    Axis axis = Axis::Descendant;
    NodeKind kind = NodeKind::SourceUnit;
    std::vector<Predicate> predicates;
    /// Sub-patterns evaluated relative to the candidate; the candidate is
    /// rejected if any of them matches.
    std::vector<QueryPattern> negated;
};

struct QueryPattern {
    std::vector<Step> steps;
    std::string text;

    /// Compiles the XPath-like syntax, e.g.
    ///   //MemberAccess[@object='block'][@member='number' or @member='coinbase']
    ///   //FunctionDef[@is_constructor='false'][not(./ModifierInvocation[@name='onlyOwner'])]
    /// Throws PatternError on unknown node kinds, unknown attribute keys, or bad syntax.
    static QueryPattern compile(std::string_view text);
};

/// All matches in document order, without duplicates. The returned pointers
/// refer into `root`.
[[nodiscard]] std::vector<const Node*> query(const Node& root, const QueryPattern& pattern);

}  // namespace solscan::ir
