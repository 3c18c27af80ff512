#include "solscan/pragma.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <optional>
#include <regex>
#include <vector>

#include "lexer.hpp"
#include "solscan/error.hpp"

namespace solscan::ir {
namespace {

constexpr SemVer kV5{0, 5, 0};
constexpr SemVer kMin{0, 0, 0};
constexpr SemVer kMax{std::numeric_limits<std::uint32_t>::max(), 0, 0};

/// Half-open [lo, hi).
struct Range {
    SemVer lo = kMin;
    SemVer hi = kMax;
    [[nodiscard]] bool empty() const { return !(lo < hi); }
};

struct Partial {
    SemVer version;
    int components = 3;  // how many of major.minor.patch were written
};

SemVer next_patch(SemVer v) { return {v.major, v.minor, v.patch + 1}; }

/// First version past everything a partial version denotes ("0.4" -> 0.5.0).
SemVer partial_end(const Partial& p) {
    switch (p.components) {
        case 1: return {p.version.major + 1, 0, 0};
        case 2: return {p.version.major, p.version.minor + 1, 0};
        default: return next_patch(p.version);
    }
}

std::optional<Range> comparator_range(std::string_view op, const Partial& p) {
    const SemVer v = p.version;
    if (op == "^") {
        if (v.major > 0 || p.components == 1) {
            return Range{v, {v.major + 1, 0, 0}};
        }
        if (v.minor > 0 || p.components == 2) {
            return Range{v, {0, v.minor + 1, 0}};
        }
        return Range{v, next_patch(v)};
    }
    if (op == "~") {
        if (p.components == 1) {
            return Range{v, {v.major + 1, 0, 0}};
        }
        return Range{v, {v.major, v.minor + 1, 0}};
    }
    if (op == ">=") return Range{v, kMax};
    if (op == ">") return Range{partial_end(p), kMax};
    if (op == "<") return Range{kMin, v};
    if (op == "<=") return Range{kMin, partial_end(p)};
    if (op.empty() || op == "=") return Range{v, partial_end(p)};
    return std::nullopt;
}

std::optional<Range> parse_alternative(const std::string& text) {
    static const std::regex comparator(R"(\s*(\^|~|>=|<=|>|<|=)?\s*v?(\d+)(?:\.(\d+))?(?:\.(\d+))?\s*)");
    Range range;
    bool any = false;
    auto begin = text.cbegin();
    std::smatch m;
    while (begin != text.cend()) {
        if (std::all_of(begin, text.cend(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
            break;
        }
        if (!std::regex_search(begin, text.cend(), m, comparator, std::regex_constants::match_continuous)) {
            return std::nullopt;
        }
        Partial p;
        p.version.major = static_cast<std::uint32_t>(std::stoul(m[2].str()));
        p.components = 1;
        if (m[3].matched) {
            p.version.minor = static_cast<std::uint32_t>(std::stoul(m[3].str()));
            p.components = 2;
        }
        if (m[4].matched) {
            p.version.patch = static_cast<std::uint32_t>(std::stoul(m[4].str()));
            p.components = 3;
        }
        auto r = comparator_range(m[1].matched ? m[1].str() : std::string{}, p);
        if (!r) {
            return std::nullopt;
        }
        range.lo = std::max(range.lo, r->lo);
        range.hi = std::min(range.hi, r->hi);
        any = true;
        begin = m[0].second;
    }
    if (!any) {
        return std::nullopt;
    }
    return range;
}

}  // namespace

std::string SemVer::str() const {
    return std::to_string(major) + "." + std::to_string(minor) + "." + std::to_string(patch);
}

std::string_view to_string(VersionClass c) noexcept {
    switch (c) {
        case VersionClass::BelowV5: return "BelowV5";
        case VersionClass::AtOrAboveV5: return "AtOrAboveV5";
        case VersionClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

VersionConstraint parse_version_constraint(std::string raw) {
    VersionConstraint result;
    result.raw = std::move(raw);

    std::vector<Range> ranges;
    std::size_t start = 0;
    while (start <= result.raw.size()) {
        const auto bar = result.raw.find("||", start);
        const auto piece = result.raw.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
        auto range = parse_alternative(piece);
        if (!range) {
            return result;
        }
        if (!range->empty()) {
            ranges.push_back(*range);
        }
        if (bar == std::string::npos) {
            break;
        }
        start = bar + 2;
    }
    if (ranges.empty()) {
        return result;
    }

    SemVer lowest = kMax;
    bool all_below = true;
    bool all_above = true;
    for (const auto& r : ranges) {
        lowest = std::min(lowest, r.lo);
        all_below = all_below && r.hi <= kV5;
        all_above = all_above && kV5 <= r.lo;
    }
    if (kMin < lowest) {
        result.lower_bound = lowest;
    }
    if (all_below) {
        result.classification = VersionClass::BelowV5;
    } else if (all_above) {
        result.classification = VersionClass::AtOrAboveV5;
    }
    return result;
}

VersionConstraint extract_pragma(const SourceFile& file) {
    std::vector<detail::Token> tokens;
    try {
        tokens = detail::tokenize(file);
    } catch (const ParseError&) {
        return {};
    }
    for (std::size_t i = 0; i + 2 < tokens.size(); ++i) {
        if (!tokens[i].is("pragma") || !tokens[i + 1].is("solidity")) {
            continue;
        }
        const std::size_t begin = tokens[i + 1].end;
        std::size_t j = i + 2;
        while (j < tokens.size() && tokens[j].kind != detail::TokenKind::End && !tokens[j].is(";")) {
            ++j;
        }
        const std::size_t end = tokens[j].begin;
        std::string raw(std::string_view(file.text()).substr(begin, end - begin));
        const auto first = raw.find_first_not_of(" \t\r\n");
        const auto last = raw.find_last_not_of(" \t\r\n");
        raw = first == std::string::npos ? std::string{} : raw.substr(first, last - first + 1);
        return parse_version_constraint(std::move(raw));
    }
    return {};
}

}  // namespace solscan::ir
