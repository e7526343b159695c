// Copyright 2026 The isnad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

#include "isnad/pipeline.hpp"
#include "isnad/service.hpp"
#include "oracles.hpp"

namespace isnad::service {
namespace {

class ServiceTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    work_ = new testing::TempDir();
    pipeline::PipelineConfig c;
    c.manifest = testing::sample_manifest();
    c.work_dir = work_->path();
    ASSERT_TRUE(pipeline::run_pipeline(c).complete);
  }
  static void TearDownTestSuite() {
    delete work_;
    work_ = nullptr;
  }

  void SetUp() override { start(1213); }

  void start(std::size_t sample_size) {
    stop();
    ServiceConfig sc;
    sc.corpus_store = work_->path() / "corpus.jsonl";
    sc.bundles_store = work_->path() / "bundles.jsonl";
    sc.evaluation_store = evals_ / ("evaluations-" + std::to_string(++generation_) + ".jsonl");
    sc.sample_size = sample_size;
    sc.seed = 7;
    svc_ = std::make_unique<Service>(sc);
    port_ = svc_->bind_any("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { svc_->listen_bound(); });
    client().set_connection_timeout(5, 0);
    for (int i = 0; i < 200; ++i) {
      if (auto r = client().Get("/healthz"); r && r->status == 200) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
  }

  void stop() {
    if (svc_) svc_->stop();
    if (thread_.joinable()) thread_.join();
    svc_.reset();
    client_.reset();
  }

  void TearDown() override { stop(); }

  httplib::Client& client() {
    if (!client_) client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    return *client_;
  }

  json record(const std::string& narration, const std::string& evaluator, double score = 8.0) {
    return json{{"narration_id", narration},
                {"evaluator_id", evaluator},
                {"aspect_scores", {{"summarization", score}, {"grouping", 9.0}}},
                {"error_counts", {{"translation", {{"error_units", 2}, {"total_units", 40}}}}},
                {"is_non_hadith", false}};
  }

  std::size_t sample_size() {
    auto r = client().Get("/api/v1/report");
    return json::parse(r->body).at("sample_size").get<std::size_t>();
  }

  static testing::TempDir* work_;
  testing::TempDir evals_;
  int generation_ = 0;
  std::unique_ptr<Service> svc_;
  std::unique_ptr<httplib::Client> client_;
  std::thread thread_;
  int port_ = -1;
};

testing::TempDir* ServiceTest::work_ = nullptr;

TEST_F(ServiceTest, HealthAndNextItem) {
  EXPECT_EQ(client().Get("/healthz")->status, 200);
  EXPECT_EQ(client().Get("/api/v1/sample/next")->status, 400);
  auto r = client().Get("/api/v1/sample/next?evaluator=ev1");
  ASSERT_EQ(r->status, 200);
  const auto item = json::parse(r->body);
  EXPECT_EQ(item["narration"]["narration_id"], svc_->sample().front());
  EXPECT_TRUE(item["bundle"].is_object());
  EXPECT_TRUE(item["neighbors"].is_array());
  EXPECT_EQ(svc_->sample().size(), 160u);
}

TEST_F(ServiceTest, SubmitRoundTripsRootCauseLink) {
  const auto id = svc_->sample().front();
  json body = record(id, "ev1");
  body["error_counts"]["tagging"] = {{"error_units", 1}, {"total_units", 4}};
  body["root_cause_links"] = {{"tagging", "translation"}};
  body["free_notes"] = "tags follow the bad translation";
  auto post = client().Post("/api/v1/evaluations", body.dump(), "application/json");
  ASSERT_EQ(post->status, 201) << post->body;
  auto get = client().Get(("/api/v1/evaluations/" + id + "@ev1").c_str());
  ASSERT_EQ(get->status, 200);
  EXPECT_EQ(json::parse(get->body).get<EvaluationRecord>(), body.get<EvaluationRecord>());
  EXPECT_EQ(client().Get("/api/v1/evaluations/nobody@none")->status, 404);
}

TEST_F(ServiceTest, DuplicateSubmissionRecordedOnce) {
  const auto id = svc_->sample().front();
  const auto body = record(id, "ev1").dump();
  EXPECT_EQ(client().Post("/api/v1/evaluations", body, "application/json")->status, 201);
  auto again = client().Post("/api/v1/evaluations", body, "application/json");
  EXPECT_EQ(again->status, 200);
  EXPECT_FALSE(json::parse(again->body)["created"].get<bool>());
  EXPECT_EQ(sample_size(), 1u);
}

TEST_F(ServiceTest, ValidationAndMalformedBodies) {
  auto bad = client().Post("/api/v1/evaluations", record("n1", "ev1", 11).dump(), "application/json");
  ASSERT_EQ(bad->status, 422);
  const auto err = json::parse(bad->body);
  EXPECT_EQ(err["error"], "validation");
  EXPECT_EQ(err["invariant"], "score in [0,10]");
  EXPECT_EQ(client().Post("/api/v1/evaluations", "{not json", "application/json")->status, 400);
  EXPECT_EQ(sample_size(), 0u);
}

TEST_F(ServiceTest, ConcurrentSubmissionsAllCounted) {
  const auto before = sample_size();
  std::vector<std::thread> threads;
  std::atomic<int> created{0};
  for (int i = 0; i < 50; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", port_);
      auto r = c.Post("/api/v1/evaluations", record(svc_->sample()[static_cast<std::size_t>(i)], "ev1").dump(),
                      "application/json");
      if (r && r->status == 201) ++created;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(created.load(), 50);
  EXPECT_EQ(sample_size(), before + 50);
}

TEST_F(ServiceTest, ReadYourWritesAndQueueAdvances) {
  start(2);
  const auto first = json::parse(client().Get("/api/v1/sample/next?evaluator=ev1")->body)["narration"]["narration_id"];
  ASSERT_EQ(client().Post("/api/v1/evaluations", record(first, "ev1").dump(), "application/json")->status, 201);
  const auto report = json::parse(client().Get("/api/v1/report")->body);
  EXPECT_EQ(report["sample_size"], 1);
  const auto second = json::parse(client().Get("/api/v1/sample/next?evaluator=ev1")->body)["narration"]["narration_id"];
  EXPECT_NE(second, first);
  ASSERT_EQ(client().Post("/api/v1/evaluations", record(second, "ev1").dump(), "application/json")->status, 201);
  EXPECT_EQ(client().Get("/api/v1/sample/next?evaluator=ev1")->status, 204);
  EXPECT_EQ(client().Get("/api/v1/sample/next?evaluator=ev2")->status, 200);
}

}  // namespace
}  // namespace isnad::service
