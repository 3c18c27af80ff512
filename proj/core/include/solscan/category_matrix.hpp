#pragma once

#include <map>
#include <string>
#include <vector>

#include "solscan/dataset.hpp"
#include "solscan/normalizer.hpp"

namespace solscan::report {

struct MatrixRow {
    std::size_t detected = 0;
    std::size_t annotated = 0;

    friend bool operator==(const MatrixRow&, const MatrixRow&) = default;
};

struct CategoryMatrix {
    /// Every category, including empty ones.
    std::map<DaspCategory, MatrixRow> rows;
    MatrixRow total;

    friend bool operator==(const CategoryMatrix&, const CategoryMatrix&) = default;
};

/// An annotated vulnerability counts as detected when some finding of the
/// same category, in the same file (compared by canonical path), overlaps its
/// line range.
[[nodiscard]] CategoryMatrix build_category_matrix(const std::vector<normalize::NormalizedReport>& reports,
                                                   const std::vector<dataset::AnnotatedContract>& annotations);

/// `round(100 * detected / annotated)` with ties to even, e.g. 5/8 -> 62.
/// 0 when nothing is annotated.
[[nodiscard]] unsigned percent(std::size_t detected, std::size_t annotated);

/// "4/19 21%"
[[nodiscard]] std::string format_cell(const MatrixRow& row);

/// Aligned table with one column per tool. Categories without annotations are
/// left out unless no category has any.
[[nodiscard]] std::string render_matrices(const std::vector<std::pair<std::string, CategoryMatrix>>& columns);

/// `{"<tool>": {"rows": [{"category", "detected", "annotated", "percent"}], "total": {...}}}`
[[nodiscard]] std::string matrices_to_json(const std::vector<std::pair<std::string, CategoryMatrix>>& columns);

}  // namespace solscan::report
