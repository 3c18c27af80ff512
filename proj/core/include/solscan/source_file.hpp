#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace solscan::ir {

/// 1-based line and column.
struct Location {
    std::size_t line = 1;
    std::size_t column = 1;

    friend bool operator==(const Location&, const Location&) = default;
};

/// A Solidity source text together with its byte offset -> line/column index.
class SourceFile {
public:
    SourceFile() : SourceFile({}, std::string{}) {}
    SourceFile(std::filesystem::path path, std::string text);

    /// Reads the file from disk. Throws solscan::Error when it cannot be read.
    static SourceFile load(const std::filesystem::path& path);

    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }
    [[nodiscard]] std::size_t line_count() const noexcept { return line_starts_.size(); }

    /// Valid for every offset in [0, text().size()].
    [[nodiscard]] Location location(std::size_t offset) const;
    [[nodiscard]] std::size_t offset(Location loc) const;

    /// Text of a 1-based line, without its terminator.
    [[nodiscard]] std::string_view line_text(std::size_t line) const;

private:
    std::filesystem::path path_;
    std::string text_;
    std::vector<std::size_t> line_starts_;
};

}  // namespace solscan::ir
