#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace solscan {

/// DASP 10 categories; "Unknown Unknowns" is called Other.
enum class DaspCategory {
    AccessControl,
    Arithmetic,
    BadRandomness,
    DenialOfService,
    FrontRunning,
    Reentrancy,
    ShortAddresses,
    TimeManipulation,
    UncheckedLowLevelCalls,
    Other,
};

inline constexpr std::array<DaspCategory, 10> kAllCategories = {
    DaspCategory::AccessControl,   DaspCategory::Arithmetic,     DaspCategory::BadRandomness,
    DaspCategory::DenialOfService, DaspCategory::FrontRunning,   DaspCategory::Reentrancy,
    DaspCategory::ShortAddresses,  DaspCategory::TimeManipulation, DaspCategory::UncheckedLowLevelCalls,
    DaspCategory::Other,
};

/// Label used in manifests and reports, e.g. "Bad Randomness".
[[nodiscard]] std::string_view to_string(DaspCategory category) noexcept;

/// Accepts labels case-insensitively with spaces, underscores or dashes as
/// separators ("Time manipulation", "time_manipulation", "unchecked-low-level-calls").
[[nodiscard]] std::optional<DaspCategory> parse_category(std::string_view text);

}  // namespace solscan
