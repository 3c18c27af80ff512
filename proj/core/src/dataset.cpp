#include "solscan/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include "solscan/checksum.hpp"
#include "solscan/error.hpp"

namespace solscan::dataset {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t line_of(std::string_view text, std::size_t offset) {
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + std::min(offset, text.size()), '\n')) + 1;
}

/// Offsets of the objects directly inside the top-level array.
std::vector<std::size_t> top_level_objects(std::string_view text) {
    std::vector<std::size_t> starts;
    int depth = 0;
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (c == '\\') {
                ++i;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[' || c == '{') {
            if (c == '{' && depth == 1) {
                starts.push_back(i);
            }
            ++depth;
        } else if (c == ']' || c == '}') {
            --depth;
        }
    }
    return starts;
}

LineRange parse_line_entry(const json& entry) {
    if (entry.is_number_unsigned() || entry.is_number_integer()) {
        const auto line = entry.get<long long>();
        if (line <= 0) {
            throw std::invalid_argument("line numbers start at 1");
        }
        return {static_cast<std::size_t>(line), static_cast<std::size_t>(line)};
    }
    if (entry.is_string()) {
        const auto text = entry.get<std::string>();
        std::size_t a = 0;
        std::size_t b = 0;
        char dash = 0;
        std::istringstream in(text);
        if (in >> a >> dash >> b && dash == '-' && in.eof() && a >= 1 && a <= b) {
            return {a, b};
        }
        throw std::invalid_argument("bad line range '" + text + "'");
    }
    throw std::invalid_argument("line entries must be numbers or \"a-b\" ranges");
}

void expand_entry(const fs::path& entry, std::vector<fs::path>& out) {
    std::error_code ec;
    if (fs::is_directory(entry, ec)) {
        for (const auto& item : fs::recursive_directory_iterator(entry)) {
            if (item.is_regular_file() && item.path().extension() == ".sol") {
                out.push_back(item.path().lexically_normal());
            }
        }
    } else if (fs::is_regular_file(entry, ec)) {
        out.push_back(entry.lexically_normal());
    } else {
        throw MissingPath("dataset path does not exist: " + entry.string());
    }
}

std::vector<fs::path> sorted_unique(std::vector<fs::path> files) {
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
    files.erase(std::unique(files.begin(), files.end()), files.end());
    std::unordered_set<std::string> seen;
    std::vector<fs::path> kept;
    for (auto& file : files) {
        if (seen.insert(dedup_key(read_bytes(file))).second) {
            kept.push_back(std::move(file));
        }
    }
    return kept;
}

}  // namespace

std::string dedup_key(std::string_view text) {
    std::string stripped;
    stripped.reserve(text.size());
    std::copy_if(text.begin(), text.end(), std::back_inserter(stripped), [](char c) { return c != ' ' && c != '\t'; });
    return md5_hex(stripped);
}

std::vector<NamedDataset> parse_dataset_config(std::string_view yaml_text) {
    YAML::Node doc;
    try {
        doc = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("dataset config: ") + e.what());
    }
    std::vector<NamedDataset> datasets;
    if (doc.IsNull()) {
        return datasets;
    }
    if (!doc.IsMap()) {
        throw ConfigError("dataset config: expected a mapping of names to paths");
    }
    for (const auto& item : doc) {
        NamedDataset ds;
        ds.name = item.first.as<std::string>();
        if (ds.name.empty()) {
            throw ConfigError("dataset config: empty dataset name");
        }
        if (item.second.IsScalar()) {
            ds.entries.push_back(item.second.as<std::string>());
        } else if (item.second.IsSequence()) {
            for (const auto& entry : item.second) {
                if (!entry.IsScalar()) {
                    throw ConfigError("dataset '" + ds.name + "': entries must be paths");
                }
                ds.entries.push_back(entry.as<std::string>());
            }
        }
        if (ds.entries.empty()) {
            throw ConfigError("dataset '" + ds.name + "' lists no paths");
        }
        datasets.push_back(std::move(ds));
    }
    return datasets;
}

std::vector<NamedDataset> load_dataset_config(const fs::path& file) {
    if (!fs::is_regular_file(file)) {
        throw ConfigError("dataset config not found: " + file.string());
    }
    return parse_dataset_config(read_bytes(file));
}

std::vector<fs::path> resolve_dataset(std::string_view name, const std::vector<NamedDataset>& config,
                                      const fs::path& base_dir) {
    const auto it = std::find_if(config.begin(), config.end(), [&](const auto& ds) { return ds.name == name; });
    if (it == config.end()) {
        throw UnknownDataset(std::string(name));
    }
    std::vector<fs::path> files;
    for (const auto& entry : it->entries) {
        const fs::path path(entry);
        expand_entry(path.is_absolute() ? path : base_dir / path, files);
    }
    return sorted_unique(std::move(files));
}

std::vector<fs::path> resolve_paths(const std::vector<fs::path>& entries) {
    std::vector<fs::path> files;
    for (const auto& entry : entries) {
        expand_entry(entry, files);
    }
    return sorted_unique(std::move(files));
}

std::vector<AnnotatedContract> load_annotations(const fs::path& corpus_dir) {
    const fs::path manifest = corpus_dir / kManifestFile;
    if (!fs::is_regular_file(manifest)) {
        throw ManifestError(manifest.string() + ": manifest not found");
    }
    const std::string text = read_bytes(manifest);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ManifestError(manifest.string() + ":" + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ManifestError(manifest.string() + ":1: expected an array of contracts");
    }
    const auto starts = top_level_objects(text);
    std::vector<AnnotatedContract> out;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const auto& item = doc[i];
        const std::size_t line = i < starts.size() ? line_of(text, starts[i]) : 1;
        try {
            if (!item.is_object()) {
                throw std::invalid_argument("expected an object");
            }
            const fs::path rel = item.contains("path") ? item.at("path").get<std::string>()
                                                       : item.at("name").get<std::string>();
            const fs::path path = (rel.is_absolute() ? rel : corpus_dir / rel).lexically_normal();
            if (!fs::is_regular_file(path)) {
                throw std::invalid_argument("contract file not found: " + path.string());
            }
            std::optional<std::string> url;
            std::optional<std::string> author;
            if (item.contains("source") && item.at("source").is_string()) {
                url = item.at("source").get<std::string>();
            }
            if (item.contains("author") && item.at("author").is_string()) {
                author = item.at("author").get<std::string>();
            }
            const auto& vulns = item.at("vulnerabilities");
            if (!vulns.is_array() || vulns.empty()) {
                throw std::invalid_argument("'vulnerabilities' must be a non-empty array");
            }
            const std::string source = read_bytes(path);
            const std::size_t line_count = line_of(source, source.size());
            std::vector<AnnotatedContract> records;
            for (const auto& vuln : vulns) {
                const auto label = vuln.at("category").get<std::string>();
                const auto category = parse_category(label);
                if (!category) {
                    throw std::invalid_argument("unknown category '" + label + "'");
                }
                auto record = std::find_if(records.begin(), records.end(),
                                           [&](const auto& r) { return r.category == *category; });
                if (record == records.end()) {
                    records.push_back({path, *category, {}, url, author});
                    record = records.end() - 1;
                }
                const auto& lines = vuln.at("lines");
                if (!lines.is_array() || lines.empty()) {
                    throw std::invalid_argument("'lines' must be a non-empty array");
                }
                for (const auto& entry : lines) {
                    const auto range = parse_line_entry(entry);
                    if (range.end > line_count) {
                        throw std::invalid_argument("line " + std::to_string(range.end) + " is past the end of " +
                                                    path.string());
                    }
                    record->vuln_lines.push_back(range);
                }
            }
            std::move(records.begin(), records.end(), std::back_inserter(out));
        } catch (const std::exception& e) {
            throw ManifestError(manifest.string() + ":" + std::to_string(line) + ": entry " + std::to_string(i + 1) +
                                ": " + e.what());
        }
    }
    return out;
}

std::size_t count_loc(std::string_view source) {
    std::size_t count = 0;
    bool in_block = false;
    char quote = 0;
    bool code_on_line = false;
    for (std::size_t i = 0; i < source.size(); ++i) {
        const char c = source[i];
        const char next = i + 1 < source.size() ? source[i + 1] : '\0';
        if (c == '\n') {
            count += code_on_line ? 1 : 0;
            code_on_line = false;
            continue;
        }
        if (in_block) {
            if (c == '*' && next == '/') {
                in_block = false;
                ++i;
            }
        } else if (quote) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '/' && next == '/') {
            while (i + 1 < source.size() && source[i + 1] != '\n') {
                ++i;
            }
        } else if (c == '/' && next == '*') {
            in_block = true;
            ++i;
        } else if (c == '"' || c == '\'') {
            quote = c;
            code_on_line = true;
        } else if (c != ' ' && c != '\t' && c != '\r') {
            code_on_line = true;
        }
    }
    return count + (code_on_line ? 1 : 0);
}

CorpusStats corpus_stats(const std::vector<AnnotatedContract>& annotations) {
    CorpusStats stats;
    for (const auto category : kAllCategories) {
        stats.rows[category] = {};
    }
    for (const auto& contract : annotations) {
        auto& row = stats.rows[contract.category];
        ++row.contracts;
        row.vulns += contract.vuln_lines.size();
        row.loc += count_loc(read_bytes(contract.path));
    }
    for (const auto& [category, row] : stats.rows) {
        stats.total.contracts += row.contracts;
        stats.total.vulns += row.vulns;
        stats.total.loc += row.loc;
    }
    return stats;
}

std::string render_stats(const CorpusStats& stats) {
    std::ostringstream out;
    auto row = [&](std::string_view label, const CategoryStats& s) {
        out << std::left << std::setw(28) << label << std::right << std::setw(10) << s.contracts << std::setw(8)
            << s.vulns << std::setw(8) << s.loc << '\n';
    };
    out << std::left << std::setw(28) << "Category" << std::right << std::setw(10) << "Contracts" << std::setw(8)
        << "Vulns" << std::setw(8) << "LoC" << '\n';
    for (const auto& [category, s] : stats.rows) {
        row(to_string(category), s);
    }
    row("Total", stats.total);
    return out.str();
}

}  // namespace solscan::dataset
