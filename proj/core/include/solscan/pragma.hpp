#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

#include "solscan/source_file.hpp"

namespace solscan::ir {

struct SemVer {
    std::uint32_t major = 0;
    std::uint32_t minor = 0;
    std::uint32_t patch = 0;

    friend auto operator<=>(const SemVer&, const SemVer&) = default;
    [[nodiscard]] std::string str() const;
};

enum class VersionClass { BelowV5, AtOrAboveV5, Unknown };

[[nodiscard]] std::string_view to_string(VersionClass c) noexcept;

struct VersionConstraint {
    std::string raw;
    std::optional<SemVer> lower_bound;
    VersionClass classification = VersionClass::Unknown;
};

/// Classifies a version expression such as "^0.4.24" or ">=0.5.0 <0.7.0".
[[nodiscard]] VersionConstraint parse_version_constraint(std::string raw);

/// Reads the first `pragma solidity` directive outside comments. Never throws.
[[nodiscard]] VersionConstraint extract_pragma(const SourceFile& file);

}  // namespace solscan::ir
