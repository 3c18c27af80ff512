#include "solscan/dasp.hpp"

#include <cctype>
#include <string>

#include "solscan/finding.hpp"

namespace solscan {
namespace {

std::string canonical(std::string_view text) {
    std::string out;
    for (char c : text) {
        if (c == ' ' || c == '_' || c == '-') {
            continue;
        }
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

}  // namespace

std::string_view to_string(DaspCategory category) noexcept {
    switch (category) {
        case DaspCategory::AccessControl: return "Access Control";
        case DaspCategory::Arithmetic: return "Arithmetic";
        case DaspCategory::BadRandomness: return "Bad Randomness";
        case DaspCategory::DenialOfService: return "Denial of service";
        case DaspCategory::FrontRunning: return "Front running";
        case DaspCategory::Reentrancy: return "Reentrancy";
        case DaspCategory::ShortAddresses: return "Short addresses";
        case DaspCategory::TimeManipulation: return "Time manipulation";
        case DaspCategory::UncheckedLowLevelCalls: return "Unchecked low level calls";
        case DaspCategory::Other: return "Other";
    }
    return "Other";
}

std::optional<DaspCategory> parse_category(std::string_view text) {
    const auto key = canonical(text);
    for (auto category : kAllCategories) {
        if (canonical(to_string(category)) == key) {
            return category;
        }
    }
    if (key == "unknownunknowns") {
        return DaspCategory::Other;
    }
    return std::nullopt;
}

std::string_view to_string(Severity severity) noexcept {
    return severity == Severity::Error ? "error" : "warning";
}

std::optional<Severity> parse_severity(std::string_view text) noexcept {
    if (text == "error") {
        return Severity::Error;
    }
    if (text == "warning") {
        return Severity::Warning;
    }
    return std::nullopt;
}

}  // namespace solscan
