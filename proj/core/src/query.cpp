#include "solscan/query.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "solscan/error.hpp"

namespace solscan::ir {
namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

/// Recursive-descent compiler for the pattern syntax.
class PatternCompiler {
public:
    explicit PatternCompiler(std::string_view text) : text_(text) {}

    QueryPattern compile_absolute() {
        QueryPattern pattern = compile_steps(false);
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return pattern;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw PatternError("pattern '" + std::string(text_) + "' at " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool consume(std::string_view s) {
        skip_ws();
        if (text_.substr(pos_, s.size()) == s) {
            pos_ += s.size();
            return true;
        }
        return false;
    }

    void require(std::string_view s) {
        if (!consume(s)) {
            fail("expected '" + std::string(s) + "'");
        }
    }

    /// Consumes a keyword only when followed by a non-identifier character.
    bool consume_word(std::string_view word) {
        skip_ws();
        if (text_.substr(pos_, word.size()) != word) {
            return false;
        }
        const std::size_t after = pos_ + word.size();
        if (after < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[after])) || text_[after] == '_')) {
            return false;
        }
        pos_ = after;
        return true;
    }

    std::string name() {
        skip_ws();
        const std::size_t begin = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' || text_[pos_] == '-')) {
            ++pos_;
        }
        if (begin == pos_) {
            fail("expected a name");
        }
        return std::string(text_.substr(begin, pos_ - begin));
    }

    std::string attribute_key() {
        require("@");
        std::string key = name();
        const auto& keys = known_attribute_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            fail("unknown attribute key '" + key + "'");
        }
        return key;
    }

    std::string literal() {
        skip_ws();
        if (pos_ >= text_.size() || (text_[pos_] != '\'' && text_[pos_] != '"')) {
            fail("expected a quoted literal");
        }
        const char quote = text_[pos_++];
        const auto close = text_.find(quote, pos_);
        if (close == std::string_view::npos) {
            fail("unterminated literal");
        }
        std::string value(text_.substr(pos_, close - pos_));
        pos_ = close + 1;
        return value;
    }

    QueryPattern compile_steps(bool relative) {
        const std::size_t begin = pos_;
        QueryPattern pattern;
        skip_ws();
        if (relative) {
            require(".");
        }
        while (true) {
            Step step;
            if (consume("//")) {
                step.axis = Axis::Descendant;
            } else if (consume("/")) {
                step.axis = Axis::Child;
            } else {
                break;
            }
            const std::string kind_name = name();
            const auto kind = node_kind_from_string(kind_name);
            if (!kind) {
                fail("unknown node kind '" + kind_name + "'");
            }
            step.kind = *kind;
            while (consume("[")) {
                if (consume_word("not")) {
                    require("(");
                    step.negated.push_back(compile_steps(true));
                    require(")");
                } else {
                    step.predicates.push_back(predicate());
                }
                require("]");
            }
            pattern.steps.push_back(std::move(step));
        }
        if (pattern.steps.empty()) {
            fail("a pattern needs at least one step");
        }
        pattern.text = std::string(text_.substr(begin, pos_ - begin));
        return pattern;
    }

    Predicate predicate() {
        Predicate pred;
        do {
            Predicate::Alternative alt;
            do {
                atom(alt);
            } while (consume_word("and"));
            pred.alternatives.push_back(std::move(alt));
        } while (consume_word("or"));
        return pred;
    }

    void atom(Predicate::Alternative& alt) {
        skip_ws();
        if (consume_word("contains")) {
            require("(");
            AttributeTest test{AttributeTest::Op::Contains, attribute_key(), {}};
            require(",");
            test.value = literal();
            require(")");
            alt.tests.push_back(std::move(test));
            return;
        }
        if (consume_word("lower-case")) {
            require("(");
            AttributeTest test{AttributeTest::Op::EqualsIgnoreCase, attribute_key(), {}};
            require(")");
            require("=");
            test.value = lower(literal());
            alt.tests.push_back(std::move(test));
            return;
        }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            if (alt.exists) {
                fail("only one sub-pattern per conjunction");
            }
            alt.exists = std::make_shared<const QueryPattern>(compile_steps(true));
            return;
        }
        AttributeTest test{AttributeTest::Op::Exists, attribute_key(), {}};
        if (consume("!=")) {
            test.op = AttributeTest::Op::NotEquals;
            test.value = literal();
        } else if (consume("=")) {
            test.op = AttributeTest::Op::Equals;
            test.value = literal();
        }
        alt.tests.push_back(std::move(test));
    }
};

bool holds(const AttributeTest& test, const Node& node) {
    const std::string* value = node.attribute(test.key);
    switch (test.op) {
        case AttributeTest::Op::Equals: return value && *value == test.value;
        case AttributeTest::Op::NotEquals: return !value || *value != test.value;
        case AttributeTest::Op::Contains: return value && value->find(test.value) != std::string::npos;
        case AttributeTest::Op::EqualsIgnoreCase: return value && lower(*value) == test.value;
        case AttributeTest::Op::Exists: return value != nullptr;
    }
    return false;
}

void collect_descendants(const Node& node, std::vector<const Node*>& out) {
    for (const auto& child : node.children) {
        out.push_back(&child);
        collect_descendants(child, out);
    }
}

std::vector<const Node*> evaluate(const std::vector<const Node*>& contexts, const QueryPattern& pattern,
                                  bool include_self);

bool step_matches(const Step& step, const Node& node) {
    if (node.kind != step.kind) {
        return false;
    }
    for (const auto& pred : step.predicates) {
        const bool any = std::any_of(pred.alternatives.begin(), pred.alternatives.end(), [&](const auto& alt) {
            const bool tests_ok =
                std::all_of(alt.tests.begin(), alt.tests.end(), [&](const auto& t) { return holds(t, node); });
            return tests_ok && (!alt.exists || !evaluate({&node}, *alt.exists, false).empty());
        });
        if (!any) {
            return false;
        }
    }
    return std::none_of(step.negated.begin(), step.negated.end(),
                        [&](const QueryPattern& sub) { return !evaluate({&node}, sub, false).empty(); });
}

// `include_self` treats each context as the child of a virtual document node,
// so that `//SourceUnit` and `/SourceUnit` match the root itself.
std::vector<const Node*> evaluate(const std::vector<const Node*>& contexts, const QueryPattern& pattern,
                                  bool include_self) {
    std::vector<const Node*> current = contexts;
    bool first = true;
    for (const auto& step : pattern.steps) {
        std::vector<const Node*> next;
        std::unordered_set<const Node*> seen;
        for (const Node* ctx : current) {
            std::vector<const Node*> candidates;
            if (first && include_self) {
                candidates.push_back(ctx);
                if (step.axis == Axis::Descendant) {
                    collect_descendants(*ctx, candidates);
                }
            } else if (step.axis == Axis::Descendant) {
                collect_descendants(*ctx, candidates);
            } else {
                for (const auto& child : ctx->children) {
                    candidates.push_back(&child);
                }
            }
            for (const Node* cand : candidates) {
                if (step_matches(step, *cand) && seen.insert(cand).second) {
                    next.push_back(cand);
                }
            }
        }
        current = std::move(next);
        first = false;
        if (current.empty()) {
            break;
        }
    }
    return current;
}

}  // namespace

QueryPattern QueryPattern::compile(std::string_view text) {
    return PatternCompiler(text).compile_absolute();
}

std::vector<const Node*> query(const Node& root, const QueryPattern& pattern) {
    auto matches = evaluate({&root}, pattern, true);
    if (matches.size() > 1) {
        std::unordered_map<const Node*, std::size_t> order;
        std::vector<const Node*> all{&root};
        collect_descendants(root, all);
        for (std::size_t i = 0; i < all.size(); ++i) {
            order.emplace(all[i], i);
        }
        std::sort(matches.begin(), matches.end(), [&](const Node* a, const Node* b) { return order[a] < order[b]; });
    }
    return matches;
}

}  // namespace solscan::ir
