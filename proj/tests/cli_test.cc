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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "json.hpp"
#include "rceval/corpus.h"
#include "rceval/lexical.h"
#include "rceval/score_file.h"
#include "test_util.h"

namespace rceval {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  RunResult Run(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(RCEVAL_CLI_PATH) + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = ReadFileToString(out);
    r.err = ReadFileToString(err);
    return r;
  }

  std::string P(const std::string& name) const { return (dir_ / name).string(); }

  json ReadJson(const std::string& name) const {
    return json::parse(ReadFileToString(dir_ / name));
  }

  void WriteCorpus(const std::string& name, int per_dataset = 15) {
    corpus_ = testing::ToyCorpus({"d1", "d2", "d3"}, per_dataset, 5);
    WriteJudged(dir_ / name, corpus_);
  }

  void WriteFinetuneManifest(const std::string& name, int epochs = 1) {
    json m = {{"corpus", P("corpus.json")},
              {"encoder", {{"preset", "tiny"}}},
              {"train_config",
               {{"epochs", epochs},
                {"batch_size", 8},
                {"learning_rates", {1e-3, 2e-3, 3e-3}}}}};
    WriteStringToFile(dir_ / name, m.dump());
  }

  testing::TempDir tmp_;
  fs::path dir_ = tmp_.path();
  std::vector<JudgedInstance> corpus_;
};

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(Run("").exit_code, 1);
  EXPECT_EQ(Run("frobnicate").exit_code, 1);
  EXPECT_EQ(Run("score --corpus x.json").exit_code, 1);
  WriteCorpus("corpus.json");
  auto r = Run("score --metric learned --corpus " + P("corpus.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("learned:<checkpoint_dir>"), std::string::npos) << r.err;
  r = Run("score --metric bleu4 --corpus " + P("corpus.json"));
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("rouge_l"), std::string::npos);
  EXPECT_EQ(Run("--help").exit_code, 0);
}

TEST_F(CliTest, ValidationErrorsExitTwo) {
  WriteStringToFile(dir_ / "broken.json", "[{\"dataset_id\": ");
  auto r = Run("--strict --out-dir " + P("o") + " ingest --input " +
               P("broken.json"));
  EXPECT_EQ(r.exit_code, 2) << r.err;
  EXPECT_EQ(Run("stats --corpus " + P("missing.json")).exit_code, 2);
}

TEST_F(CliTest, IngestDropsAndIsAFixedPoint) {
  auto corpus = testing::ToyCorpus({"d1"}, 10, 5);
  corpus[1].candidate = corpus[1].reference;
  corpus[3].reference = "42";
  corpus[3].candidate = "41";
  WriteJudged(dir_ / "raw.json", corpus);
  auto r = Run("--out-dir " + P("a") +
               " ingest --filter-exact --filter-numeric --input " + P("raw.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto report = ReadJson("a/ingest_report.json");
  size_t expected_drops = 0;
  for (const auto& inst : corpus) {
    if (lexical::NormalizeTokenize(inst.reference) ==
            lexical::NormalizeTokenize(inst.candidate) ||
        inst.reference == "42") {
      ++expected_drops;
    }
  }
  ASSERT_GE(expected_drops, 2u);
  ASSERT_EQ(report["dropped"].size(), expected_drops) << report.dump(2);
  auto kept = LoadJudged(dir_ / "a/corpus.json").records;
  EXPECT_EQ(kept.size(), corpus.size() - expected_drops);

  r = Run("--out-dir " + P("b") + " ingest --filter-exact --input " +
          P("a/corpus.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(ReadFileToString(dir_ / "a/corpus.json"),
            ReadFileToString(dir_ / "b/corpus.json"));
  EXPECT_TRUE(fs::exists(dir_ / "b/manifest.json"));
}

TEST_F(CliTest, ScoreMatchesLibrary) {
  WriteCorpus("corpus.json");
  auto r = Run("--out-dir " + P("s") + " score --metric meteor --corpus " +
               P("corpus.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto entries = ReadScoreFile(dir_ / "s/scores.json");
  ASSERT_EQ(entries.size(), corpus_.size());
  for (size_t i = 0; i < corpus_.size(); ++i) {
    EXPECT_EQ(entries[i].first, corpus_[i].instance_id);
    EXPECT_EQ(entries[i].second,
              lexical::ScorePair(lexical::Metric::kMeteor, corpus_[i].reference,
                                 corpus_[i].candidate));
  }
}

TEST_F(CliTest, TrainRecordsGridAndIsDeterministic) {
  WriteCorpus("corpus.json");
  WriteFinetuneManifest("ft.json");
  for (const char* out : {"t1", "t2"}) {
    auto r = Run("--seed 4 --out-dir " + P(out) + " train finetune --manifest " +
                 P("ft.json"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
  }
  auto prov = ReadJson("t1/checkpoint/provenance.json");
  EXPECT_EQ(prov["history"]["runs"].size(), 3u);
  EXPECT_EQ(prov["seed"], 4);
  EXPECT_EQ(prov["config"]["learning_rates"].size(), 3u);
  EXPECT_FALSE(fs::exists(dir_ / "t1/checkpoint/INCOMPLETE"));
  EXPECT_FALSE(fs::exists(dir_ / "t1/checkpoint/.lock"));
  EXPECT_EQ(ReadFileToString(dir_ / "t1/checkpoint/params.bin"),
            ReadFileToString(dir_ / "t2/checkpoint/params.bin"));
  EXPECT_EQ(ReadFileToString(dir_ / "t1/history/finetune_summary.json"),
            ReadFileToString(dir_ / "t2/history/finetune_summary.json"));

  // Existing checkpoint without --force.
  auto again = Run("--seed 4 --out-dir " + P("t1") +
                   " train finetune --manifest " + P("ft.json"));
  EXPECT_NE(again.exit_code, 0);
  EXPECT_EQ(Run("--seed 4 --out-dir " + P("t1") +
                " train finetune --force --manifest " + P("ft.json"))
                .exit_code,
            0);

  // The trained checkpoint scores through the learned metric.
  auto r = Run("--out-dir " + P("ls") + " score --metric learned:" +
               P("t1/checkpoint") + " --corpus " + P("corpus.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(ReadScoreFile(dir_ / "ls/scores.json").size(), corpus_.size());
}

TEST_F(CliTest, CorrWithGoldScoresIsOne) {
  WriteCorpus("corpus.json");
  ScoreEntries gold;
  for (const auto& inst : corpus_) gold.emplace_back(inst.instance_id, *inst.gold_score);
  WriteScoreFile(dir_ / "gold.json", gold);
  auto r = Run("--out-dir " + P("c") + " eval corr --corpus " +
               P("corpus.json") + " --scores " + P("gold.json") +
               " --metric bleu1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto report = ReadJson("c/corr.json");
  ASSERT_EQ(report["reports"].size(), 2u);
  bool found = false;
  for (const auto& rep : report["reports"]) {
    if (rep["metric"] != "gold") continue;
    found = true;
    for (const auto& cell : rep["cells"]) {
      EXPECT_NEAR(cell["r"].get<double>(), 1.0, 1e-12);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(report.contains("manifest_sha256"));
  EXPECT_NE(ReadFileToString(dir_ / "c/corr.txt")
                .find(report["manifest_sha256"].get<std::string>()),
            std::string::npos);

  gold.pop_back();
  WriteScoreFile(dir_ / "partial.json", gold);
  r = Run("--out-dir " + P("c2") + " eval corr --corpus " + P("corpus.json") +
          " --scores " + P("partial.json"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_NE(r.err.find(corpus_.back().instance_id), std::string::npos) << r.err;
}

TEST_F(CliTest, PairsWithConstantScoresIsHalf) {
  std::vector<MinimalPair> pairs;
  ScoreEntries flat;
  for (int i = 0; i < 6; ++i) {
    MinimalPair p;
    p.dataset_id = i < 3 ? "a" : "b";
    p.pair_id = "p" + std::to_string(i);
    p.passage = "passage";
    p.question = "q";
    p.reference = "river stone";
    p.candidate_1 = "river stone";
    p.candidate_2 = "cloud";
    p.score_1 = 5;
    p.score_2 = 1;
    pairs.push_back(p);
    flat.emplace_back(p.pair_id + "#1", 3.0);
    flat.emplace_back(p.pair_id + "#2", 3.0);
  }
  WriteMinimalPairs(dir_ / "pairs.json", pairs);
  WriteScoreFile(dir_ / "flat.json", flat);
  auto r = Run("--out-dir " + P("p") + " eval pairs --pairs " + P("pairs.json") +
               " --scores " + P("flat.json") + " --metric bleu1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto report = ReadJson("p/pairs.json");
  for (const auto& rep : report["reports"]) {
    if (rep["metric"] == "flat") {
      EXPECT_EQ(rep["average"], 0.5);
    } else {
      EXPECT_EQ(rep["average"], 1.0);
    }
  }
}

TEST_F(CliTest, DivergeTopK) {
  ScoreEntries a, b;
  for (int i = 0; i < 30; ++i) {
    a.emplace_back("i" + std::to_string(i), i * 0.1);
    b.emplace_back("i" + std::to_string(i), 0.0);
  }
  WriteScoreFile(dir_ / "a.json", a);
  WriteScoreFile(dir_ / "b.json", b);
  auto r = Run("--out-dir " + P("d") + " eval diverge --scores-a " + P("a.json") +
               " --scores-b " + P("b.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto report = ReadJson("d/diverge.json");
  ASSERT_EQ(report["entries"].size(), 10u);
  EXPECT_EQ(report["entries"][0]["instance_id"], "i29");
  EXPECT_EQ(report["entries"][9]["instance_id"], "i20");
}

TEST_F(CliTest, ConfigFileAndFlagPrecedence) {
  WriteCorpus("corpus.json");
  json cfg = {{"seed", 11}, {"score", {{"metric", "rouge_l"}, {"corpus", P("corpus.json")}}}};
  WriteStringToFile(dir_ / "cfg.json", cfg.dump());
  auto r = Run("--config " + P("cfg.json") + " --out-dir " + P("k") + " score");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  auto manifest = ReadJson("k/manifest.json");
  EXPECT_EQ(manifest["seed"], 11);
  EXPECT_EQ(manifest["config_file_contents"], cfg);
  auto entries = ReadScoreFile(dir_ / "k/scores.json");
  EXPECT_EQ(entries[0].second,
            lexical::ScorePair(lexical::Metric::kRougeL, corpus_[0].reference,
                               corpus_[0].candidate));

  r = Run("--config " + P("cfg.json") + " --out-dir " + P("k2") +
          " --seed 12 score --metric bleu1");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(ReadJson("k2/manifest.json")["seed"], 12);
  EXPECT_EQ(ReadScoreFile(dir_ / "k2/scores.json")[0].second,
            lexical::ScorePair(lexical::Metric::kBleu1, corpus_[0].reference,
                               corpus_[0].candidate));
}

TEST_F(CliTest, StatsReport) {
  WriteCorpus("corpus.json", 10);
  auto r = Run("--out-dir " + P("st") + " stats --corpus " + P("corpus.json"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir_ / "st/stats.json"));
  EXPECT_TRUE(fs::exists(dir_ / "st/stats.txt"));
  EXPECT_TRUE(fs::exists(dir_ / "st/score_histogram.csv"));
}

}  // namespace
}  // namespace rceval
