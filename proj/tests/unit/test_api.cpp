#include <gtest/gtest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

#include "solscan/api_service.hpp"
#include "solscan/container_runtime.hpp"
#include "test_support.hpp"

namespace {

using namespace solscan;
using namespace solscan::api;
using nlohmann::json;
namespace t = solscan::test;

const std::string kTimeSnippet =
    "pragma solidity ^0.4.24;\n"
    "contract Sale {\n"
    "  uint public deadline;\n"
    "  function open() public view returns (bool) {\n"
    "    return now < deadline;\n"
    "  }\n"
    "}\n";

ServiceConfig config_in(const t::TempDir& dir) {
    ServiceConfig config;
    config.config_dir = t::config_dir();
    config.work_dir = dir / "work";
    config.runtime = std::make_shared<exec::ProcessRuntime>(
        exec::ProcessRuntime::load_image_map(t::write_stub_map(dir)), dir / "scratch");
    config.timeout = std::chrono::seconds(20);
    return config;
}

TEST(AnalysisService, SourceRunCompletes) {
    t::TempDir dir;
    AnalysisService service(config_in(dir));
    const auto id = service.submit_source(kTimeSnippet, "sale.sol", {"builtin-smartcheck-ext"});
    service.wait_idle();
    const auto run = service.get(id);
    ASSERT_TRUE(run);
    EXPECT_EQ(run->status, RunStatus::Done) << run->error;
    ASSERT_EQ(run->reports.size(), 1u);
    EXPECT_EQ(run->reports[0].findings.size(), 1u);
    const auto doc = json::parse(run_to_json(*run));
    EXPECT_EQ(doc["status"], "done");
    EXPECT_EQ(doc["source"], "sale.sol");
    ASSERT_EQ(doc["results"].size(), 1u);
    EXPECT_EQ(doc["results"][0]["issues"], 1);
    ASSERT_EQ(doc["results"][0]["categories"].size(), 1u);
    EXPECT_EQ(doc["results"][0]["categories"][0]["category"], "Time manipulation");
    EXPECT_EQ(doc["results"][0]["categories"][0]["count"], 1);
}

TEST(AnalysisService, DatasetRunAndValidation) {
    t::TempDir dir;
    AnalysisService service(config_in(dir));
    EXPECT_THROW(service.submit_source("  \n", "x.sol", {"builtin-smartcheck"}), RequestError);
    EXPECT_THROW(service.submit_source(kTimeSnippet, "x.sol", {}), RequestError);
    EXPECT_THROW(service.submit_source(kTimeSnippet, "x.sol", {"nope"}), RequestError);
    EXPECT_THROW(service.submit_dataset("nope", {"builtin-smartcheck"}), RequestError);
    EXPECT_THROW(service.submit_dataset("../etc", {"builtin-smartcheck"}), RequestError);
    const auto id = service.submit_dataset("reentrancy", {"builtin-smartcheck", "mock-lines"});
    service.wait_idle();
    const auto run = service.get(id);
    ASSERT_TRUE(run);
    EXPECT_EQ(run->status, RunStatus::Done) << run->error;
    EXPECT_EQ(run->reports.size(), 6u);
    EXPECT_FALSE(service.get("missing"));
    EXPECT_NE(std::find(service.dataset_names().begin(), service.dataset_names().end(), "fixtures"),
              service.dataset_names().end());
}

TEST(AnalysisService, FileNamesAreSanitized) {
    t::TempDir dir;
    AnalysisService service(config_in(dir));
    const auto id = service.submit_source(kTimeSnippet, "../../escape.sol", {"builtin-smartcheck"});
    service.wait_idle();
    const auto run = service.get(id);
    ASSERT_TRUE(run);
    EXPECT_EQ(run->source_name->find('/'), std::string::npos);
    EXPECT_FALSE(t::fs::exists(dir / "escape.sol"));
}

TEST(AnalysisService, InfrastructureFailureMarksRunFailed) {
    t::TempDir dir;
    AnalysisService service(config_in(dir));
    const auto id = service.submit_source(kTimeSnippet, "a.sol", {"securify"});
    service.wait_idle();
    const auto run = service.get(id);
    ASSERT_TRUE(run);
    EXPECT_EQ(run->status, RunStatus::Failed);
    EXPECT_FALSE(run->error.empty());
}

TEST(AnalysisService, PersistedRunsReload) {
    t::TempDir dir;
    auto config = config_in(dir);
    config.persist_dir = dir / "runs";
    std::string id;
    {
        AnalysisService service(config);
        id = service.submit_source(kTimeSnippet, "a.sol", {"builtin-smartcheck-ext"});
        service.wait_idle();
    }
    AnalysisService reloaded(config);
    const auto run = reloaded.get(id);
    ASSERT_TRUE(run);
    EXPECT_EQ(run->status, RunStatus::Done);
    ASSERT_EQ(run->reports.size(), 1u);
    EXPECT_EQ(run->reports[0].findings.size(), 1u);
}

TEST(AnalysisService, InterruptedRunsBecomeFailed) {
    t::TempDir dir;
    auto config = config_in(dir);
    config.persist_dir = dir / "runs";
    t::write_file(dir / "runs/abc123.json",
                  R"({"id":"abc123","status":"running","tools":["builtin-smartcheck"],"source":"a.sol","results":[],"reports":[]})");
    AnalysisService service(config);
    const auto run = service.get("abc123");
    ASSERT_TRUE(run);
    EXPECT_EQ(run->status, RunStatus::Failed);
}

class ApiServerTest : public ::testing::Test {
protected:
    t::TempDir dir;
    AnalysisService service{config_in(dir)};
    ApiServer server{service};
    int port = 0;
    std::thread thread;

    void SetUp() override {
        port = server.bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        thread = std::thread([this] { server.listen(); });
    }
    void TearDown() override {
        server.stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_connection_timeout(5);
        c.set_read_timeout(20);
        return c;
    }

    json poll(const std::string& id) {
        auto c = client();
        for (int i = 0; i < 200; ++i) {
            const auto res = c.Get("/runs/" + id);
            EXPECT_TRUE(res);
            auto doc = json::parse(res->body);
            if (doc["status"] == "done" || doc["status"] == "failed") {
                return doc;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(50));
        }
        ADD_FAILURE() << "run " << id << " did not finish";
        return {};
    }
};

TEST_F(ApiServerTest, ToolsAndDatasets) {
    auto c = client();
    const auto tools = c.Get("/tools");
    ASSERT_TRUE(tools);
    EXPECT_EQ(tools->status, 200);
    EXPECT_EQ(tools->get_header_value("Access-Control-Allow-Origin"), "*");
    const auto list = json::parse(tools->body);
    ASSERT_EQ(list.size(), 5u);
    EXPECT_EQ(list[0]["id"], "builtin-smartcheck");
    EXPECT_EQ(list[0]["builtin"], true);
    const auto datasets = json::parse(c.Get("/datasets")->body);
    EXPECT_FALSE(datasets.empty());
    EXPECT_EQ(c.Options("/analyze")->status, 204);
}

TEST_F(ApiServerTest, PasteAndUploadGiveTheSameView) {
    auto c = client();
    const json body{{"source", kTimeSnippet}, {"tools", {"builtin-smartcheck-ext"}}};
    const auto pasted = c.Post("/analyze", body.dump(), "application/json");
    ASSERT_TRUE(pasted);
    ASSERT_EQ(pasted->status, 202) << pasted->body;
    const auto first = poll(json::parse(pasted->body)["id"]);

    const httplib::MultipartFormDataItems items = {
        {"file", kTimeSnippet, "contract.sol", "text/plain"},
        {"tools", "builtin-smartcheck-ext", "", ""},
    };
    const auto uploaded = c.Post("/analyze", items);
    ASSERT_TRUE(uploaded);
    ASSERT_EQ(uploaded->status, 202) << uploaded->body;
    const auto second = poll(json::parse(uploaded->body)["id"]);

    EXPECT_EQ(first["status"], "done");
    ASSERT_EQ(first["results"].size(), 1u);
    EXPECT_EQ(first["results"][0]["categories"].size(), 1u);
    EXPECT_EQ(first["results"][0]["categories"][0]["category"], "Time manipulation");
    EXPECT_EQ(first["results"][0]["categories"][0]["count"], 1);
    EXPECT_EQ(first["results"][0]["categories"][0]["findings"][0]["file"], "contract.sol");
    EXPECT_EQ(first["results"], second["results"]);
}

TEST_F(ApiServerTest, CommaSeparatedToolsAndDatasetRuns) {
    auto c = client();
    const auto res = c.Post("/analyze", json{{"dataset", "short_addresses"}, {"tools", "builtin-smartcheck, mock-lines"}}.dump(),
                            "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 202) << res->body;
    const auto doc = poll(json::parse(res->body)["id"]);
    EXPECT_EQ(doc["dataset"], "short_addresses");
    EXPECT_EQ(doc["results"].size(), 2u);
    ASSERT_EQ(doc["reports"].size(), 2u);
    EXPECT_EQ(doc["reports"][0]["contract"], "tests/fixtures/corpus/short_addresses/token.sol");
}

TEST_F(ApiServerTest, RejectsBadRequests) {
    auto c = client();
    EXPECT_EQ(c.Post("/analyze", "not json", "application/json")->status, 400);
    EXPECT_EQ(c.Post("/analyze", "[1]", "application/json")->status, 400);
    EXPECT_EQ(c.Post("/analyze", json{{"source", kTimeSnippet}, {"tools", {"nope"}}}.dump(), "application/json")->status,
              400);
    EXPECT_EQ(c.Post("/analyze", json{{"source", kTimeSnippet}, {"dataset", "reentrancy"}, {"tools", "builtin-smartcheck"}}
                                     .dump(),
                     "application/json")
                  ->status,
              400);
    const auto big = c.Post("/analyze", std::string(ApiServer::kMaxBody + 10, 'x'), "application/json");
    ASSERT_TRUE(big);
    EXPECT_EQ(big->status, 413);
    const auto missing = c.Get("/runs/doesnotexist");
    EXPECT_EQ(missing->status, 404);
    EXPECT_EQ(json::parse(missing->body).contains("error"), true);
    EXPECT_EQ(c.Get("/nowhere")->status, 404);
}

}  // namespace
