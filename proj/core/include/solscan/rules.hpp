#pragma once

#include <functional>
#include <string>
#include <vector>

#include "solscan/finding.hpp"
#include "solscan/ir.hpp"
#include "solscan/query.hpp"
#include "solscan/source_file.hpp"

namespace solscan::rules {

inline constexpr std::string_view kBadRandomness = "SOLIDITY_BAD_RANDOMNESS";
inline constexpr std::string_view kExactTime = "SOLIDITY_EXACT_TIME";
inline constexpr std::string_view kUnprotected = "SOLIDITY_UNPROTECTED";
inline constexpr std::string_view kTxOrigin = "SOLIDITY_TX_ORIGIN";

/// Knobs for the access-control rule.
struct AccessControlOptions {
    /// Compared case-insensitively; `owner` is always included.
    std::vector<std::string> owner_names = {"owner", "_owner", "admin"};
    std::vector<std::string> protective_modifiers = {"onlyOwner", "onlyAdmin", "isOwner"};
};

struct Rule {
    using Evaluator = std::function<std::vector<Finding>(const Rule&, const ir::Node&, const ir::SourceFile&)>;

    std::string id;
    DaspCategory category = DaspCategory::Other;
    Severity severity = Severity::Warning;
    std::vector<ir::QueryPattern> patterns;
    std::string description;
    Evaluator evaluate;
};

using Ruleset = std::vector<Rule>;

[[nodiscard]] Rule bad_randomness_rule();
/// The comparison-only time rule; `general` extends it to every expression.
[[nodiscard]] Rule exact_time_rule(bool general);
[[nodiscard]] Rule unprotected_rule(const AccessControlOptions& options = {});
[[nodiscard]] Rule tx_origin_rule();

/// tx.origin and the comparison-only time rule.
[[nodiscard]] Ruleset base_ruleset();
/// Base plus bad randomness and unprotected access; the general time rule
/// takes the place of the comparison-only one.
[[nodiscard]] Ruleset extended_ruleset(const AccessControlOptions& options = {});

[[nodiscard]] std::vector<Finding> detect_bad_randomness(const ir::Node& root, const ir::SourceFile& file);
[[nodiscard]] std::vector<Finding> detect_exact_time(const ir::Node& root, const ir::SourceFile& file);
[[nodiscard]] std::vector<Finding> detect_unprotected(const ir::Node& root, const ir::SourceFile& file,
                                                      const AccessControlOptions& options = {});
[[nodiscard]] std::vector<Finding> detect_tx_origin(const ir::Node& root, const ir::SourceFile& file);

/// Runs every rule and stable-sorts by (start line, rule id).
/// Throws std::invalid_argument for an empty ruleset.
[[nodiscard]] std::vector<Finding> run_rules(const ir::Node& root, const ir::SourceFile& file,
                                             const Ruleset& ruleset);

/// Human-readable listing: one block per rule with id, category, severity
/// and pattern texts.
[[nodiscard]] std::string rules_manifest(const Ruleset& ruleset);

}  // namespace solscan::rules
