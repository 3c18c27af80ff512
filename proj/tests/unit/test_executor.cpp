#include <gtest/gtest.h>

#include "solscan/container_runtime.hpp"
#include "solscan/error.hpp"
#include "solscan/executor.hpp"
#include "solscan/normalizer.hpp"
#include "solscan/report_io.hpp"
#include "solscan/tool_registry.hpp"
#include "test_support.hpp"

namespace {

using namespace solscan;
using namespace solscan::exec;
using namespace std::chrono_literals;
namespace t = solscan::test;
using Status = TaskOutcome::Status;

class ExecutorTest : public ::testing::Test {
protected:
    t::TempDir work;
    registry::ToolRegistry reg = registry::ToolRegistry::load(t::config_dir() / "tools");
    normalize::TaxonomyMap taxonomy = normalize::TaxonomyMap::from_registry(reg);
    ProcessRuntime runtime{ProcessRuntime::load_image_map(t::write_stub_map(work)), work / "scratch"};

    std::vector<t::fs::path> contracts() const {
        return {t::corpus_dir() / "time_manipulation/roulette.sol", t::corpus_dir() / "access_control/kill.sol",
                t::corpus_dir() / "reentrancy/bank.sol"};
    }

    BatchOptions options(const std::string& sub, unsigned processes = 1) const {
        BatchOptions o;
        o.processes = processes;
        o.out_dir = work / sub / "results";
        o.log_dir = work / sub / "logs";
        o.stamp = "20240101_0000";
        o.timeout = 20s;
        return o;
    }

    std::vector<registry::ToolDescriptor> mocks() const { return {reg.get("mock-lines"), reg.get("mock-json")}; }
};

TEST(RunStamp, Format) {
    const auto stamp = run_stamp();
    ASSERT_EQ(stamp.size(), 13u);
    EXPECT_EQ(stamp[8], '_');
    EXPECT_EQ(stamp.find_first_not_of("0123456789_"), std::string::npos);
}

TEST(ResultDir, Layout) {
    EXPECT_EQ(result_dir("out", "securify", "20240101_1200", "a/b/Token.sol"),
              t::fs::path("out/securify/20240101_1200/Token/"));
}

TEST_F(ExecutorTest, MakeTaskRoutesByPragma) {
    t::write_file(work / "old.sol", "pragma solidity ^0.4.24;\ncontract A {}\n");
    t::write_file(work / "new.sol", "pragma solidity ^0.5.1;\ncontract A {}\n");
    t::write_file(work / "none.sol", "contract A {}\n");
    const auto& securify = reg.get("securify");
    EXPECT_EQ(make_task(securify, work / "old.sol").image, "qspprotocol/securify-0.4.25");
    EXPECT_EQ(make_task(securify, work / "new.sol").image, "qspprotocol/securify-usolc");
    EXPECT_EQ(make_task(securify, work / "none.sol").image, "qspprotocol/securify-usolc");
    EXPECT_TRUE(make_task(reg.get("builtin-smartcheck-ext"), work / "old.sol").image.empty());
}

TEST_F(ExecutorTest, BuiltinRunsInProcess) {
    const auto result = run_task(make_task(reg.get("builtin-smartcheck-ext"), contracts()[0]), runtime);
    EXPECT_EQ(result.exit_code, 0);
    const auto report = normalize::parse_tool_output(reg.get("builtin-smartcheck-ext"), result, taxonomy);
    EXPECT_TRUE(report.success);
    EXPECT_EQ(report.findings.size(), 3u);
}

TEST_F(ExecutorTest, BuiltinParseErrorExitsNonZero) {
    t::write_file(work / "broken.sol", "contract A {\n");
    const auto result = run_task(make_task(reg.get("builtin-smartcheck"), work / "broken.sol"), runtime);
    EXPECT_EQ(result.exit_code, 1);
    EXPECT_FALSE(result.stderr_text.empty());
}

TEST_F(ExecutorTest, MissingContract) {
    EXPECT_THROW((void)run_task(make_task(reg.get("mock-lines"), work / "absent.sol"), runtime), MissingPath);
}

TEST_F(ExecutorTest, BatchWritesEveryPair) {
    const auto summary = run_batch(mocks(), contracts(), options("a"), runtime, taxonomy);
    EXPECT_EQ(summary.executed, 6u);
    EXPECT_EQ(summary.failed, 0u);
    EXPECT_EQ(summary.unsuccessful, 0u);
    ASSERT_EQ(summary.outcomes.size(), 6u);
    EXPECT_EQ(summary.outcomes[0].tool_id, "mock-lines");
    EXPECT_EQ(summary.outcomes[3].tool_id, "mock-json");
    for (const auto& outcome : summary.outcomes) {
        EXPECT_EQ(outcome.status, Status::Executed);
        EXPECT_TRUE(t::fs::is_regular_file(outcome.dir / normalize::kReportFile)) << outcome.dir;
        EXPECT_TRUE(t::fs::is_regular_file(outcome.dir / normalize::kRawFile));
        EXPECT_TRUE(t::fs::is_regular_file(outcome.dir / normalize::kRunFile));
    }
    EXPECT_TRUE(t::fs::is_directory(work / "a/results/mock-lines/20240101_0000/roulette"));
    EXPECT_TRUE(t::fs::is_regular_file(summary.log_file));
    EXPECT_EQ(summary.log_file, work / "a/logs/20240101_0000.log");
}

TEST_F(ExecutorTest, SkipExistingReusesOlderStamps) {
    auto opts = options("b");
    (void)run_batch(mocks(), contracts(), opts, runtime, taxonomy);
    opts.skip_existing = true;
    opts.stamp = "20240102_0000";
    const auto again = run_batch(mocks(), contracts(), opts, runtime, taxonomy);
    EXPECT_EQ(again.executed, 0u);
    EXPECT_EQ(again.skipped, 6u);
    for (const auto& outcome : again.outcomes) {
        ASSERT_TRUE(outcome.report);
        EXPECT_NE(outcome.dir.generic_string().find("20240101_0000"), std::string::npos);
    }
    EXPECT_TRUE(has_result(opts.out_dir, "mock-json", contracts()[1]));
    EXPECT_FALSE(has_result(opts.out_dir, "securify", contracts()[1]));
}

TEST_F(ExecutorTest, SkipIgnoresChangedContentAndIncompleteDirs) {
    auto opts = options("c");
    t::write_file(work / "c/x.sol", "contract A { function f() { uint t = now; } }\n");
    const std::vector<t::fs::path> one = {work / "c/x.sol"};
    const auto first = run_batch({reg.get("mock-lines")}, one, opts, runtime, taxonomy);
    opts.skip_existing = true;
    opts.stamp = "20240101_0001";
    t::write_file(work / "c/x.sol", "contract A { function f() { uint t = now + 1; } }\n");
    EXPECT_EQ(run_batch({reg.get("mock-lines")}, one, opts, runtime, taxonomy).executed, 1u);
    // Without result.json the older directory does not count.
    t::fs::remove(first.outcomes[0].dir / normalize::kReportFile);
    t::write_file(work / "c/x.sol", "contract A { function f() { uint t = now; } }\n");
    opts.stamp = "20240101_0002";
    EXPECT_EQ(run_batch({reg.get("mock-lines")}, one, opts, runtime, taxonomy).executed, 1u);
}

TEST_F(ExecutorTest, ResultsIndependentOfWorkerCount) {
    const auto one = run_batch(mocks(), contracts(), options("p1", 1), runtime, taxonomy);
    const auto four = run_batch(mocks(), contracts(), options("p4", 4), runtime, taxonomy);
    ASSERT_EQ(one.outcomes.size(), four.outcomes.size());
    for (std::size_t i = 0; i < one.outcomes.size(); ++i) {
        EXPECT_EQ(t::read_file(one.outcomes[i].dir / normalize::kReportFile),
                  t::read_file(four.outcomes[i].dir / normalize::kReportFile));
    }
}

TEST_F(ExecutorTest, StemCollisionsGetSuffixes) {
    t::write_file(work / "d/a/Token.sol", "contract A {}\n");
    t::write_file(work / "d/b/Token.sol", "contract B {}\n");
    t::write_file(work / "d/c/Token.sol", "contract C {}\n");
    const auto summary = run_batch({reg.get("builtin-smartcheck")},
                                   {work / "d/a/Token.sol", work / "d/b/Token.sol", work / "d/c/Token.sol"},
                                   options("d"), runtime, taxonomy);
    const auto base = work / "d/results/builtin-smartcheck/20240101_0000";
    EXPECT_TRUE(t::fs::is_regular_file(base / "Token/result.json"));
    EXPECT_TRUE(t::fs::is_regular_file(base / "Token-2/result.json"));
    EXPECT_TRUE(t::fs::is_regular_file(base / "Token-3/result.json"));
    EXPECT_EQ(summary.executed, 3u);
}

TEST_F(ExecutorTest, InfrastructureFailuresAreRecorded) {
    registry::ToolDescriptor ghost = reg.get("mock-lines");
    ghost.id = "ghost";
    ghost.image_default = "not/registered";
    const auto summary = run_batch({ghost}, {contracts()[0]}, options("e"), runtime, taxonomy);
    EXPECT_EQ(summary.failed, 1u);
    EXPECT_EQ(summary.outcomes[0].status, Status::Failed);
    EXPECT_FALSE(summary.outcomes[0].error.empty());
    EXPECT_FALSE(t::fs::exists(work / "e/results/ghost/20240101_0000/roulette/result.json"));
    EXPECT_NE(t::read_file(summary.log_file).find("not/registered"), std::string::npos);
}

TEST_F(ExecutorTest, ToolFailureStillWritesReport) {
    registry::ToolDescriptor crashing = reg.get("mock-lines");
    crashing.id = "crashing";
    crashing.command = "crash";
    const auto summary = run_batch({crashing}, {contracts()[0]}, options("f"), runtime, taxonomy);
    EXPECT_EQ(summary.executed, 1u);
    EXPECT_EQ(summary.unsuccessful, 1u);
    const auto report = normalize::read_report(summary.outcomes[0].dir);
    EXPECT_FALSE(report.success);
    EXPECT_EQ(report.parse_errors.size(), 1u);
}

TEST_F(ExecutorTest, TimeoutIsReported) {
    registry::ToolDescriptor slow = reg.get("mock-lines");
    slow.id = "slow";
    slow.command = "sleep 30";
    auto opts = options("g");
    opts.timeout = 300ms;
    const auto summary = run_batch({slow}, {contracts()[0]}, opts, runtime, taxonomy);
    ASSERT_TRUE(summary.outcomes[0].report);
    ASSERT_FALSE(summary.outcomes[0].report->parse_errors.empty());
    EXPECT_EQ(summary.outcomes[0].report->parse_errors.front(), "timed out");
    const auto meta = normalize::read_run_metadata(summary.outcomes[0].dir);
    ASSERT_TRUE(meta);
    EXPECT_TRUE(meta->timed_out);
}

TEST_F(ExecutorTest, ZeroProcessesRejected) {
    EXPECT_THROW((void)run_batch(mocks(), contracts(), options("h", 0), runtime, taxonomy), std::invalid_argument);
}

}  // namespace
