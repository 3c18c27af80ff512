#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "solscan/dasp.hpp"
#include "solscan/finding.hpp"

namespace solscan::dataset {

/// MD5 hex digest of the source with every space (0x20) and tab (0x09)
/// removed. Newlines and carriage returns are kept.
[[nodiscard]] std::string dedup_key(std::string_view text);

struct NamedDataset {
    std::string name;
    /// Files or directories, relative to the configuration's base directory.
    std::vector<std::string> entries;
};

/// `name: path` or `name: [path, ...]`. Entries keep document order.
/// Throws ConfigError on malformed documents, empty names or empty lists.
[[nodiscard]] std::vector<NamedDataset> parse_dataset_config(std::string_view yaml_text);
[[nodiscard]] std::vector<NamedDataset> load_dataset_config(const std::filesystem::path& file);

/// Expands directories recursively to `.sol` files, sorts lexicographically
/// and keeps the first file of every dedup_key. Relative entries resolve
/// against `base_dir`. Throws UnknownDataset or MissingPath.
[[nodiscard]] std::vector<std::filesystem::path> resolve_dataset(std::string_view name,
                                                                 const std::vector<NamedDataset>& config,
                                                                 const std::filesystem::path& base_dir);

/// Same expansion and dedup for an explicit list of paths.
[[nodiscard]] std::vector<std::filesystem::path> resolve_paths(const std::vector<std::filesystem::path>& entries);

struct AnnotatedContract {
    std::filesystem::path path;
    DaspCategory category = DaspCategory::Other;
    /// One entry per annotated vulnerability.
    std::vector<LineRange> vuln_lines;
    std::optional<std::string> source_url;
    std::optional<std::string> author;
};

inline constexpr std::string_view kManifestFile = "vulnerabilities.json";

/// Reads `<corpus_dir>/vulnerabilities.json`: an array of
/// `{name, path, source?, author?, vulnerabilities: [{lines: [...], category}]}`.
/// Every listed line is one vulnerability; "a-b" strings denote ranges. A
/// contract whose vulnerabilities span several categories yields one record
/// per category. Throws ManifestError naming the file and line.
[[nodiscard]] std::vector<AnnotatedContract> load_annotations(const std::filesystem::path& corpus_dir);

/// Non-blank lines that hold something other than comments.
[[nodiscard]] std::size_t count_loc(std::string_view source);

struct CategoryStats {
    std::size_t contracts = 0;
    std::size_t vulns = 0;
    std::size_t loc = 0;

    friend bool operator==(const CategoryStats&, const CategoryStats&) = default;
};

struct CorpusStats {
    /// Every category, including empty ones.
    std::map<DaspCategory, CategoryStats> rows;
    CategoryStats total;
};

/// Reads each annotated file to count its lines of code.
[[nodiscard]] CorpusStats corpus_stats(const std::vector<AnnotatedContract>& annotations);

[[nodiscard]] std::string render_stats(const CorpusStats& stats);

}  // namespace solscan::dataset
