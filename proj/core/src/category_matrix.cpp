#include "solscan/category_matrix.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

namespace solscan::report {
namespace {

namespace fs = std::filesystem;

std::string canonical_key(const fs::path& path) {
    std::error_code ec;
    auto canonical = fs::weakly_canonical(path, ec);
    return (ec ? fs::absolute(path).lexically_normal() : canonical).generic_string();
}

}  // namespace

CategoryMatrix build_category_matrix(const std::vector<normalize::NormalizedReport>& reports,
                                     const std::vector<dataset::AnnotatedContract>& annotations) {
    // canonical file -> category -> finding ranges
    std::map<std::string, std::map<DaspCategory, std::vector<LineRange>>> found;
    for (const auto& report : reports) {
        for (const auto& finding : report.findings) {
            const auto& file = finding.contract_path.empty() ? report.contract_path : finding.contract_path;
            found[canonical_key(file)][finding.category].push_back(finding.lines);
        }
    }

    CategoryMatrix matrix;
    for (const auto category : kAllCategories) {
        matrix.rows[category] = {};
    }
    for (const auto& contract : annotations) {
        auto& row = matrix.rows[contract.category];
        const std::vector<LineRange>* ranges = nullptr;
        if (const auto file = found.find(canonical_key(contract.path)); file != found.end()) {
            if (const auto cat = file->second.find(contract.category); cat != file->second.end()) {
                ranges = &cat->second;
            }
        }
        for (const auto& vuln : contract.vuln_lines) {
            ++row.annotated;
            if (ranges && std::any_of(ranges->begin(), ranges->end(),
                                      [&](const LineRange& r) { return r.overlaps(vuln); })) {
                ++row.detected;
            }
        }
    }
    for (const auto& [category, row] : matrix.rows) {
        matrix.total.detected += row.detected;
        matrix.total.annotated += row.annotated;
    }
    return matrix;
}

unsigned percent(std::size_t detected, std::size_t annotated) {
    if (annotated == 0) {
        return 0;
    }
    const std::size_t scaled = detected * 100;
    auto quotient = static_cast<unsigned>(scaled / annotated);
    const std::size_t twice_rem = 2 * (scaled % annotated);
    if (twice_rem > annotated || (twice_rem == annotated && quotient % 2 == 1)) {
        ++quotient;
    }
    return quotient;
}

std::string format_cell(const MatrixRow& row) {
    return std::to_string(row.detected) + "/" + std::to_string(row.annotated) + " " +
           std::to_string(percent(row.detected, row.annotated)) + "%";
}

std::string render_matrices(const std::vector<std::pair<std::string, CategoryMatrix>>& columns) {
    std::vector<DaspCategory> shown;
    for (const auto category : kAllCategories) {
        const bool annotated = std::any_of(columns.begin(), columns.end(), [&](const auto& col) {
            return col.second.rows.at(category).annotated > 0;
        });
        if (annotated) {
            shown.push_back(category);
        }
    }
    if (shown.empty()) {
        shown.assign(kAllCategories.begin(), kAllCategories.end());
    }

    std::vector<std::size_t> widths;
    for (const auto& [tool, matrix] : columns) {
        std::size_t width = std::max<std::size_t>(tool.size(), format_cell(matrix.total).size());
        for (const auto& [category, row] : matrix.rows) {
            width = std::max(width, format_cell(row).size());
        }
        widths.push_back(width);
    }
    std::ostringstream out;
    constexpr int kLabelWidth = 27;
    out << std::left << std::setw(kLabelWidth) << "Category";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out << "  " << std::right << std::setw(static_cast<int>(widths[i])) << columns[i].first;
    }
    out << '\n';
    auto line = [&](std::string_view label, auto&& cell_of) {
        out << std::left << std::setw(kLabelWidth) << label;
        for (std::size_t i = 0; i < columns.size(); ++i) {
            out << "  " << std::right << std::setw(static_cast<int>(widths[i])) << format_cell(cell_of(columns[i].second));
        }
        out << '\n';
    };
    for (const auto category : shown) {
        line(to_string(category), [&](const CategoryMatrix& m) -> const MatrixRow& { return m.rows.at(category); });
    }
    line("Total", [](const CategoryMatrix& m) -> const MatrixRow& { return m.total; });
    return out.str();
}

std::string matrices_to_json(const std::vector<std::pair<std::string, CategoryMatrix>>& columns) {
    using ojson = nlohmann::ordered_json;
    auto cell = [](const MatrixRow& row) {
        return ojson{{"detected", row.detected},
                     {"annotated", row.annotated},
                     {"percent", percent(row.detected, row.annotated)}};
    };
    ojson doc = ojson::object();
    for (const auto& [tool, matrix] : columns) {
        ojson rows = ojson::array();
        for (const auto& [category, row] : matrix.rows) {
            ojson entry{{"category", std::string(to_string(category))}};
            entry.update(cell(row));
            rows.push_back(std::move(entry));
        }
        doc[tool] = ojson{{"rows", std::move(rows)}, {"total", cell(matrix.total)}};
    }
    return doc.dump(2) + "\n";
}

}  // namespace solscan::report
