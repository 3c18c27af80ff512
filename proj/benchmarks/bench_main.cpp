#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "solscan/dataset.hpp"
#include "solscan/parser.hpp"
#include "solscan/rules.hpp"

namespace {

namespace fs = std::filesystem;
using namespace solscan;

std::vector<ir::SourceFile> corpus() {
    std::vector<fs::path> paths;
    for (const auto& entry : fs::recursive_directory_iterator(fs::path(SOLSCAN_SOURCE_DIR) / "tests/fixtures/corpus")) {
        if (entry.path().extension() == ".sol") {
            paths.push_back(entry.path());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<ir::SourceFile> files;
    for (const auto& p : paths) {
        files.push_back(ir::SourceFile::load(p));
    }
    return files;
}

std::size_t corpus_bytes(const std::vector<ir::SourceFile>& files) {
    std::size_t n = 0;
    for (const auto& f : files) {
        n += f.text().size();
    }
    return n;
}

void BM_ParseCorpus(benchmark::State& state) {
    const auto files = corpus();
    for (auto _ : state) {
        for (const auto& f : files) {
            benchmark::DoNotOptimize(ir::parse_source(f));
        }
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * corpus_bytes(files)));
}
BENCHMARK(BM_ParseCorpus);

void BM_RulesCorpus(benchmark::State& state) {
    const auto files = corpus();
    std::vector<ir::Node> roots;
    for (const auto& f : files) {
        roots.push_back(ir::parse_source(f));
    }
    const auto ruleset = state.range(0) ? rules::extended_ruleset() : rules::base_ruleset();
    for (auto _ : state) {
        for (std::size_t i = 0; i < files.size(); ++i) {
            benchmark::DoNotOptimize(rules::run_rules(roots[i], files[i], ruleset));
        }
    }
    state.SetLabel(state.range(0) ? "extended" : "base");
}
BENCHMARK(BM_RulesCorpus)->Arg(0)->Arg(1);

// Synthetic contract with `n` functions mixing every trigger.
void BM_ParseAndDetectScaling(benchmark::State& state) {
    std::ostringstream text;
    text << "pragma solidity ^0.4.24;\ncontract Big {\n  address owner;\n";
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        text << "  function f" << i << "(uint x) public returns (uint) {\n"
             << "    require(msg.sender == owner);\n"
             << "    if (now > x) { owner = msg.sender; }\n"
             << "    return uint(blockhash(block.number - 1)) % x;\n  }\n";
    }
    text << "}\n";
    const ir::SourceFile file("big.sol", text.str());
    const auto ruleset = rules::extended_ruleset();
    for (auto _ : state) {
        const auto root = ir::parse_source(file);
        benchmark::DoNotOptimize(rules::run_rules(root, file, ruleset));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ParseAndDetectScaling)->RangeMultiplier(4)->Range(4, 1024)->Complexity();

void BM_DedupKey(benchmark::State& state) {
    const std::string text(static_cast<std::size_t>(state.range(0)), 'a');
    for (auto _ : state) {
        benchmark::DoNotOptimize(dataset::dedup_key(text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_DedupKey)->Range(1 << 10, 1 << 20);

}  // namespace
BENCHMARK_MAIN();
