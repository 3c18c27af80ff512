#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "solscan/dasp.hpp"

namespace solscan {

enum class Severity { Warning, Error };

[[nodiscard]] std::string_view to_string(Severity severity) noexcept;
[[nodiscard]] std::optional<Severity> parse_severity(std::string_view text) noexcept;

/// Inclusive 1-based line range. 0/0 means the tool reported no location.
struct LineRange {
    std::size_t start = 0;
    std::size_t end = 0;

    [[nodiscard]] bool overlaps(const LineRange& other) const noexcept {
        return start != 0 && other.start != 0 && start <= other.end && other.start <= end;
    }

    friend auto operator<=>(const LineRange&, const LineRange&) = default;
};

/// One vulnerability report, normalized across tools.
struct Finding {
    std::string rule_id;
    DaspCategory category = DaspCategory::Other;
    std::string contract_path;
    LineRange lines;
    std::string snippet;
    std::string message;
    /// Absent for the built-in detector; otherwise the producing tool id.
    std::optional<std::string> external_tool;
    /// Only the built-in detector reports a severity.
    std::optional<Severity> severity;

    friend bool operator==(const Finding&, const Finding&) = default;
};

}  // namespace solscan
