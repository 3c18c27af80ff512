#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "solscan/category_matrix.hpp"
#include "solscan/dataset.hpp"
#include "solscan/parser.hpp"
#include "solscan/rules.hpp"
#include "test_support.hpp"

namespace {

using namespace solscan;
using namespace solscan::report;
namespace t = solscan::test;

std::vector<normalize::NormalizedReport> detect(const rules::Ruleset& ruleset) {
    std::vector<normalize::NormalizedReport> reports;
    for (const auto& path : t::corpus_files()) {
        const auto file = ir::SourceFile::load(path);
        normalize::NormalizedReport r;
        r.tool_id = "builtin";
        r.contract_path = path.string();
        r.findings = rules::run_rules(ir::parse_source(file), file, ruleset);
        r.success = true;
        reports.push_back(std::move(r));
    }
    return reports;
}

void expect_oracle(const std::string& variant, const CategoryMatrix& matrix) {
    const auto oracle = nlohmann::json::parse(t::read_file(t::source_dir() / "tests/fixtures/oracle.json"));
    std::size_t annotated_rows = 0;
    for (const auto& [label, cell] : oracle["matrix"][variant].items()) {
        const MatrixRow want{cell[0].get<std::size_t>(), cell[1].get<std::size_t>()};
        if (label == "Total") {
            EXPECT_EQ(matrix.total, want) << variant;
        } else {
            EXPECT_EQ(matrix.rows.at(*parse_category(label)), want) << variant << " " << label;
            ++annotated_rows;
        }
    }
    for (const auto& [category, row] : matrix.rows) {
        annotated_rows -= row.annotated > 0 ? 1 : 0;
    }
    EXPECT_EQ(annotated_rows, 0u);
}

TEST(Percent, HalfEvenRounding) {
    EXPECT_EQ(percent(5, 8), 62u);
    EXPECT_EQ(percent(3, 8), 38u);
    EXPECT_EQ(percent(1, 22), 5u);
    EXPECT_EQ(percent(2, 19), 11u);
    EXPECT_EQ(percent(10, 31), 32u);
    EXPECT_EQ(percent(13, 115), 11u);
    EXPECT_EQ(percent(28, 115), 24u);
    EXPECT_EQ(percent(1, 200), 0u);
    EXPECT_EQ(percent(3, 200), 2u);
    EXPECT_EQ(percent(0, 0), 0u);
    EXPECT_EQ(percent(7, 7), 100u);
}

// Against exact rational arithmetic: 100*d/n rounded half to even.
TEST(PercentProperty, MatchesIntegerOracle) {
    for (std::size_t n = 1; n <= 300; ++n) {
        for (std::size_t d = 0; d <= n; ++d) {
            const std::size_t q = 100 * d / n;
            const std::size_t r2 = 2 * (100 * d % n);
            const std::size_t want = r2 > n || (r2 == n && q % 2 == 1) ? q + 1 : q;
            ASSERT_EQ(percent(d, n), want) << d << "/" << n;
        }
    }
}

TEST(FormatCell, Layout) {
    EXPECT_EQ(format_cell({4, 19}), "4/19 21%");
    EXPECT_EQ(format_cell({0, 0}), "0/0 0%");
}

TEST(CategoryMatrix, BaseMatchesOracle) {
    expect_oracle("base", build_category_matrix(detect(rules::base_ruleset()), dataset::load_annotations(t::corpus_dir())));
}

TEST(CategoryMatrix, ExtendedMatchesOracle) {
    expect_oracle("extended",
                  build_category_matrix(detect(rules::extended_ruleset()), dataset::load_annotations(t::corpus_dir())));
}

TEST(CategoryMatrix, MatchingRules) {
    t::TempDir dir;
    t::write_file(dir / "a.sol", "1\n2\n3\n4\n5\n6\n");
    const dataset::AnnotatedContract ann{dir / "a.sol", DaspCategory::BadRandomness, {{2, 2}, {4, 5}}, {}, {}};
    auto report_with = [&](DaspCategory cat, LineRange lines, const t::fs::path& file) {
        normalize::NormalizedReport r;
        Finding f;
        f.category = cat;
        f.lines = lines;
        f.contract_path = file.string();
        r.findings.push_back(f);
        return std::vector<normalize::NormalizedReport>{r};
    };
    EXPECT_EQ(build_category_matrix(report_with(DaspCategory::BadRandomness, {5, 9}, dir / "a.sol"), {ann}).total,
              (MatrixRow{1, 2}));
    // Path spelled differently.
    EXPECT_EQ(build_category_matrix(report_with(DaspCategory::BadRandomness, {1, 2}, dir / "x/../a.sol"), {ann}).total,
              (MatrixRow{1, 2}));
    EXPECT_EQ(build_category_matrix(report_with(DaspCategory::TimeManipulation, {2, 2}, dir / "a.sol"), {ann}).total,
              (MatrixRow{0, 2}));
    EXPECT_EQ(build_category_matrix(report_with(DaspCategory::BadRandomness, {3, 3}, dir / "a.sol"), {ann}).total,
              (MatrixRow{0, 2}));
    EXPECT_EQ(build_category_matrix(report_with(DaspCategory::BadRandomness, {0, 0}, dir / "a.sol"), {ann}).total,
              (MatrixRow{0, 2}));
    EXPECT_EQ(build_category_matrix({}, {ann}).rows.at(DaspCategory::BadRandomness), (MatrixRow{0, 2}));
}

TEST(CategoryMatrix, RenderAndJson) {
    const auto annotations = dataset::load_annotations(t::corpus_dir());
    const std::vector<std::pair<std::string, CategoryMatrix>> columns = {
        {"base", build_category_matrix(detect(rules::base_ruleset()), annotations)},
        {"ext", build_category_matrix(detect(rules::extended_ruleset()), annotations)},
    };
    const auto text = render_matrices(columns);
    EXPECT_NE(text.find("0/7 0%"), std::string::npos);
    EXPECT_NE(text.find("6/7 86%"), std::string::npos);
    EXPECT_NE(text.find("17/23 74%"), std::string::npos);
    EXPECT_EQ(text.find("Arithmetic"), std::string::npos);
    const auto doc = nlohmann::json::parse(matrices_to_json(columns));
    EXPECT_EQ(doc["ext"]["total"]["detected"], 17);
    EXPECT_EQ(doc["ext"]["total"]["percent"], 74);
    EXPECT_EQ(doc["base"]["rows"].size(), kAllCategories.size());
}

}  // namespace
