// Copyright 2026 The rceval Authors.
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

#include "rceval/service.h"

#include <memory>
#include <sstream>
#include <thread>
#include <vector>

#include "gtest/gtest.h"
#include "httplib.h"
#include "json.hpp"
#include "rceval/checkpoint.h"
#include "rceval/errors.h"
#include "rceval/lexical.h"
#include "test_util.h"

namespace rceval::service {
namespace {

using json = nlohmann::json;

std::shared_ptr<const learned::RegressionModel> SharedTinyModel() {
  return std::make_shared<const learned::RegressionModel>(testing::TinyModel(3));
}

MetricRegistry Registry(size_t queue_capacity = 4) {
  MetricRegistry r;
  r.AddLexicalMetrics();
  r.AddLearned("learned", SharedTinyModel(), "fp-test", queue_capacity);
  return r;
}

json ScoreRequest(const std::string& metric, const std::string& ref,
                  const std::string& cand) {
  return {{"metric", metric},
          {"passage", "the river ran past the stone"},
          {"question", "where did it run"},
          {"reference", ref},
          {"candidate", cand}};
}

class ServiceTest : public ::testing::Test {
 protected:
  ServiceTest() : service_(Registry(), &log_) {}
  json Call(std::string_view method, std::string_view path,
            const std::string& body, int expected_status) {
    Response r = service_.Handle(method, path, body);
    EXPECT_EQ(r.status, expected_status) << r.body;
    return json::parse(r.body);
  }
  std::ostringstream log_;
  ScoringService service_;
};

TEST_F(ServiceTest, LexicalScoreMatchesLibrary) {
  auto j = Call("POST", "/v1/score",
                ScoreRequest("meteor", "the cat sat", "a cat sat").dump(), 200);
  EXPECT_EQ(j["score"].get<double>(),
            lexical::ScorePair(lexical::Metric::kMeteor, "the cat sat",
                               "a cat sat"));
  EXPECT_EQ(j["metric"], "meteor");
  EXPECT_EQ(j["model_fingerprint"], "builtin:meteor:v1");
  EXPECT_FALSE(j.contains("raw"));
}

TEST_F(ServiceTest, LearnedScoreIsClampedPrediction) {
  auto model = service_.registry().Find("learned")->model;
  auto j = Call("POST", "/v1/score",
                ScoreRequest("learned", "stone", "a stone").dump(), 200);
  auto p = model->Predict("the river ran past the stone", "where did it run",
                          "stone", "a stone");
  EXPECT_EQ(j["raw"].get<double>(), p.raw);
  EXPECT_EQ(j["score"].get<double>(), learned::ClampToScale(p.raw));
  EXPECT_GE(j["score"].get<double>(), 1.0);
  EXPECT_LE(j["score"].get<double>(), 5.0);
  EXPECT_EQ(j["model_fingerprint"], "fp-test");
}

TEST_F(ServiceTest, PassageAndQuestionOptional) {
  json req = {{"metric", "bleu1"}, {"reference", "a b"}, {"candidate", "a"}};
  auto j = Call("POST", "/v1/score", req.dump(), 200);
  EXPECT_NEAR(j["score"].get<double>(), std::exp(-1.0), 1e-12);
}

TEST_F(ServiceTest, IdenticalBodiesIdenticalResponses) {
  const std::string body = ScoreRequest("learned", "stone", "a stone").dump();
  const auto a = service_.Handle("POST", "/v1/score", body);
  const auto b = service_.Handle("POST", "/v1/score", body);
  EXPECT_EQ(a.body, b.body);
}

TEST_F(ServiceTest, Errors) {
  auto j = Call("POST", "/v1/score", "{not json", 400);
  EXPECT_EQ(j["code"], "malformed_body");
  EXPECT_TRUE(j.contains("message"));
  EXPECT_TRUE(j["details"].is_object());

  j = Call("POST", "/v1/score", R"({"metric":"bleu1","reference":"a"})", 400);
  EXPECT_EQ(j["code"], "malformed_body");
  j = Call("POST", "/v1/score",
           R"({"metric":"bleu1","reference":"a","candidate":3})", 400);
  EXPECT_EQ(j["code"], "malformed_body");

  j = Call("POST", "/v1/score", ScoreRequest("bleu4", "a", "b").dump(), 400);
  EXPECT_EQ(j["code"], "unknown_metric");
  EXPECT_EQ(j["details"]["valid_metrics"],
            json::array({"bleu1", "learned", "meteor", "rouge_l"}));

  std::string long_ref;
  for (int i = 0; i < 200; ++i) long_ref += "word ";
  j = Call("POST", "/v1/score", ScoreRequest("learned", long_ref, "x").dump(),
           400);
  EXPECT_EQ(j["code"], "input_too_long");
  EXPECT_EQ(j["details"]["segment"], "reference");

  Call("GET", "/v1/nothing", "", 404);
  Call("GET", "/v1/score", "", 405);
  Call("POST", "/v1/health", "", 405);
}

TEST_F(ServiceTest, QueueFull) {
  auto queue = service_.registry().Find("learned")->queue;
  std::vector<InferenceQueue::Ticket> held;
  for (size_t i = 0; i < queue->capacity(); ++i) {
    held.push_back(queue->TryEnter());
    ASSERT_TRUE(held.back());
  }
  EXPECT_FALSE(queue->TryEnter());
  auto j = Call("POST", "/v1/score", ScoreRequest("learned", "a", "b").dump(),
                503);
  EXPECT_EQ(j["code"], "queue_full");
  // Lexical metrics do not queue.
  Call("POST", "/v1/score", ScoreRequest("bleu1", "a", "b").dump(), 200);
  held.clear();
  EXPECT_EQ(queue->pending(), 0u);
  Call("POST", "/v1/score", ScoreRequest("learned", "a", "b").dump(), 200);
}

TEST_F(ServiceTest, BatchEqualsSingles) {
  Rng rng(21);
  json batch = json::array();
  std::vector<json> singles;
  const char* names[] = {"bleu1", "rouge_l", "meteor", "learned"};
  for (int i = 0; i < 12; ++i) {
    auto req = ScoreRequest(names[i % 4], testing::RandomWords(rng, 4),
                            testing::RandomWords(rng, 3));
    batch.push_back(req);
    singles.push_back(Call("POST", "/v1/score", req.dump(), 200));
  }
  auto j = Call("POST", "/v1/score/batch", batch.dump(), 200);
  ASSERT_EQ(j["results"].size(), singles.size());
  for (size_t i = 0; i < singles.size(); ++i) {
    EXPECT_EQ(j["results"][i], singles[i]) << i;
  }
  auto wrapped =
      Call("POST", "/v1/score/batch", json{{"requests", batch}}.dump(), 200);
  EXPECT_EQ(wrapped, j);
}

TEST_F(ServiceTest, BatchErrors) {
  json batch = json::array({ScoreRequest("bleu1", "a", "a"),
                            ScoreRequest("nope", "a", "a")});
  auto j = Call("POST", "/v1/score/batch", batch.dump(), 400);
  EXPECT_EQ(j["code"], "unknown_metric");
  EXPECT_EQ(j["details"]["index"], 1);

  json big = json::array();
  for (size_t i = 0; i <= kMaxBatchSize; ++i) {
    big.push_back(ScoreRequest("bleu1", "a", "a"));
  }
  j = Call("POST", "/v1/score/batch", big.dump(), 413);
  EXPECT_EQ(j["code"], "batch_too_large");
  big.erase(big.begin());
  Call("POST", "/v1/score/batch", big.dump(), 200);
  Call("POST", "/v1/score/batch", R"({"x":1})", 400);
}

TEST_F(ServiceTest, HealthMetricsAndLog) {
  auto h = Call("GET", "/v1/health", "", 200);
  EXPECT_EQ(h["status"], "ok");
  EXPECT_EQ(h["fingerprints"]["learned"], "fp-test");
  EXPECT_EQ(h["fingerprints"]["bleu1"], "builtin:bleu1:v1");
  auto m = Call("GET", "/v1/metrics", "", 200);
  ASSERT_EQ(m["metrics"].size(), 4u);
  for (const auto& entry : m["metrics"]) {
    if (entry["name"] == "learned") {
      EXPECT_EQ(entry["kind"], "learned");
      EXPECT_EQ(entry["min"], 1.0);
      EXPECT_EQ(entry["max"], 5.0);
    } else {
      EXPECT_EQ(entry["kind"], "lexical");
      EXPECT_EQ(entry["max"], 1.0);
    }
  }
  log_.str("");
  Call("POST", "/v1/score", ScoreRequest("bleu1", "a", "a").dump(), 200);
  auto line = json::parse(log_.str());
  EXPECT_EQ(line["path"], "/v1/score");
  EXPECT_EQ(line["metric"], "bleu1");
  EXPECT_EQ(line["status"], 200);
  EXPECT_GE(line["latency_ms"].get<double>(), 0.0);
}

TEST(RegistryTest, DuplicateNameRejected) {
  MetricRegistry r;
  r.AddLexicalMetrics();
  EXPECT_THROW(r.AddLearned("bleu1", SharedTinyModel(), "x"), UsageError);
  EXPECT_EQ(r.Find("zzz"), nullptr);
}

TEST(ModelsManifestTest, LoadsCheckpoints) {
  testing::TempDir dir;
  learned::CheckpointMetadata meta;
  meta.phase = "finetune";
  learned::SaveCheckpoint(testing::TinyModel(3), meta, dir / "ckpt");
  WriteStringToFile((dir / "models.json").string(),
                    R"({"lexical": false, "queue_capacity": 2,
                        "models": [{"name": "m1", "checkpoint": "ckpt"}]})");
  MetricRegistry r = LoadModelsManifest(dir / "models.json");
  EXPECT_EQ(r.Names(), std::vector<std::string>{"m1"});
  const auto* m = r.Find("m1");
  EXPECT_EQ(m->fingerprint, learned::ModelFingerprint(dir / "ckpt"));
  EXPECT_EQ(m->queue->capacity(), 2u);
  WriteStringToFile((dir / "bad.json").string(),
                    R"({"models": [{"name": "m1", "checkpoint": "nope"}]})");
  EXPECT_ANY_THROW(LoadModelsManifest(dir / "bad.json"));
}

TEST(HttpServerTest, EndToEnd) {
  ScoringService service(Registry());
  HttpServer server(service);
  const int port = server.Start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);

  auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(json::parse(health->body)["status"], "ok");

  const std::string body = ScoreRequest("learned", "stone", "the stone").dump();
  auto a = client.Post("/v1/score", body, "application/json");
  auto b = client.Post("/v1/score", body, "application/json");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->status, 200);
  EXPECT_EQ(a->body, b->body);
  EXPECT_EQ(a->body, service.Handle("POST", "/v1/score", body).body);

  auto missing = client.Get("/v1/unknown");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["code"], "not_found");

  auto bad = client.Post("/v1/score", "nope", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  // Concurrent clients against one model.
  std::vector<std::thread> threads;
  std::vector<std::string> bodies(8);
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      httplib::Client c("127.0.0.1", port);
      auto r = c.Post("/v1/score", body, "application/json");
      if (r) bodies[t] = std::to_string(r->status) + r->body;
    });
  }
  for (auto& t : threads) t.join();
  for (const auto& s : bodies) {
    if (s.rfind("503", 0) == 0) continue;
    EXPECT_EQ(s, "200" + a->body);
  }
  server.Stop();
}

}  // namespace
}  // namespace rceval::service
