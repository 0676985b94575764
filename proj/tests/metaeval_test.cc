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

#include "rceval/metaeval.h"

#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "gtest/gtest.h"
#include "rceval/errors.h"
#include "rceval/lexical.h"
#include "test_util.h"

namespace rceval::metaeval {
namespace {

// Two-pass textbook Pearson, independent of the library implementation.
double OraclePearson(const std::vector<double>& x,
                     const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

ScoreEntries GoldEntries(const std::vector<JudgedInstance>& corpus) {
  ScoreEntries out;
  for (const auto& inst : corpus) out.emplace_back(inst.instance_id, *inst.gold_score);
  return out;
}

MetricFn Constant(double v) {
  return {"constant", v, v, [v](const ScoringInput&) { return v; }};
}

MetricFn Transform(const MetricFn& base, std::function<double(double)> f,
                   std::string name) {
  return {std::move(name), 0, 1,
          [base, f](const ScoringInput& in) { return f(base(in)); }};
}

MinimalPair Pair(std::string ds, std::string id, std::string c1, std::string c2,
                 Phenomenon ph) {
  MinimalPair p;
  p.dataset_id = std::move(ds);
  p.pair_id = std::move(id);
  p.passage = "some passage";
  p.question = "q";
  p.reference = "the quick brown fox";
  p.candidate_1 = std::move(c1);
  p.candidate_2 = std::move(c2);
  p.score_1 = 4;
  p.score_2 = 2;
  p.phenomenon = ph;
  return p;
}

std::vector<MinimalPair> SamplePairs() {
  return {
      Pair("a", "p1", "the quick brown fox", "a slow dog", Phenomenon::kNegation),
      Pair("a", "p2", "quick brown", "the quick brown fox", Phenomenon::kSyntax),
      Pair("a", "p3", "the fox", "the fox", Phenomenon::kSyntax),
      Pair("b", "p4", "brown fox", "cat", Phenomenon::kNegation),
      Pair("b", "p5", "the quick", "quick the", Phenomenon::kWordSense),
  };
}

TEST(CorrelationTest, GoldOracleIsPerfect) {
  auto corpus = testing::ToyCorpus({"x", "y", "z"}, 25, 2);
  auto report = EvaluateCorrelation(LookupMetric("gold", GoldEntries(corpus)),
                                    corpus, {Split::kDev, Split::kTest});
  EXPECT_EQ(report.datasets, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(report.splits, (std::vector<std::string>{"dev", "test"}));
  ASSERT_EQ(report.cells.size(), 6u);
  for (const auto& cell : report.cells) {
    ASSERT_TRUE(cell.r) << cell.dataset_id << "/" << cell.split;
    EXPECT_NEAR(*cell.r, 1.0, 1e-12);
    EXPECT_EQ(cell.n, 5u);
  }
  EXPECT_NEAR(*report.average.at("dev"), 1.0, 1e-12);
}

TEST(CorrelationTest, MatchesOracleForLexicalMetric) {
  auto corpus = testing::ToyCorpus({"x", "y"}, 25, 4);
  const auto metric = LexicalMetric(lexical::Metric::kRougeL);
  auto report = EvaluateCorrelation(metric, corpus, {Split::kTest, Split::kTrain});
  std::map<std::pair<std::string, std::string>,
           std::pair<std::vector<double>, std::vector<double>>>
      groups;
  for (const auto& inst : corpus) {
    if (inst.split == Split::kDev) continue;
    auto& g = groups[{inst.dataset_id, std::string(ToString(*inst.split))}];
    g.first.push_back(
        lexical::ScorePair(lexical::Metric::kRougeL, inst.reference, inst.candidate));
    g.second.push_back(*inst.gold_score);
  }
  std::map<std::string, std::vector<double>> per_split;
  for (const auto& [key, g] : groups) {
    const auto* cell = report.Find(key.first, key.second);
    ASSERT_NE(cell, nullptr);
    ASSERT_TRUE(cell->r);
    const double r = OraclePearson(g.first, g.second);
    EXPECT_NEAR(*cell->r, r, 1e-12);
    per_split[key.second].push_back(r);
  }
  for (const auto& [split, rs] : per_split) {
    EXPECT_NEAR(*report.average.at(split),
                std::accumulate(rs.begin(), rs.end(), 0.0) / rs.size(), 1e-12);
  }
  EXPECT_EQ(report.Find("x", "dev"), nullptr);
}

TEST(CorrelationTest, NegationAndAffineInvariance) {
  auto corpus = testing::ToyCorpus({"x"}, 30, 6);
  const auto base = LexicalMetric(lexical::Metric::kMeteor);
  const auto neg = Transform(base, [](double s) { return -s; }, "neg");
  const auto aff = Transform(base, [](double s) { return 4 * s + 1; }, "aff");
  auto r = EvaluateCorrelation(base, corpus, {});
  auto rn = EvaluateCorrelation(neg, corpus, {});
  auto ra = EvaluateCorrelation(aff, corpus, {});
  ASSERT_EQ(r.splits, (std::vector<std::string>{"all"}));
  EXPECT_EQ(r.cells[0].n, 30u);
  EXPECT_NEAR(*rn.cells[0].r, -*r.cells[0].r, 1e-12);
  EXPECT_NEAR(*ra.cells[0].r, *r.cells[0].r, 1e-12);
}

TEST(CorrelationTest, UndefinedCells) {
  std::vector<JudgedInstance> corpus = {
      testing::Judged("a", "1", "x", "x", 3.0, Split::kDev),
      testing::Judged("a", "2", "x", "y", 4.0, Split::kDev),
      testing::Judged("a", "3", "x", "y", 4.0, Split::kTest),
      testing::Judged("b", "4", "x", "y", 2.0, Split::kDev),
      testing::Judged("b", "5", "x", "y", 5.0, Split::kDev),
  };
  auto report = EvaluateCorrelation(Constant(0.5), corpus,
                                    {Split::kDev, Split::kTest});
  EXPECT_EQ(report.Find("a", "test")->undefined_reason, "fewer than 2 instances");
  EXPECT_EQ(report.Find("a", "dev")->undefined_reason, "zero variance");
  EXPECT_EQ(report.Find("b", "test")->undefined_reason, "no instances");
  EXPECT_FALSE(report.average.at("dev").has_value());
  auto no_gold = corpus;
  no_gold[0].gold_score.reset();
  EXPECT_THROW(EvaluateCorrelation(Constant(0.5), no_gold, {Split::kDev}),
               PreconditionError);
}

TEST(CorrelationTest, TrainSplitIgnoredForDevTest) {
  auto corpus = testing::ToyCorpus({"x"}, 25, 2);
  auto entries = GoldEntries(corpus);
  ScoreEntries dev_test;
  for (size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].split != Split::kTrain) dev_test.push_back(entries[i]);
  }
  EXPECT_NO_THROW(EvaluateCorrelation(LookupMetric("g", dev_test), corpus,
                                      {Split::kDev, Split::kTest}));
  EXPECT_THROW(EvaluateCorrelation(LookupMetric("g", dev_test), corpus, {}),
               MissingScoreError);
}

TEST(PerSourceTest, GroupsByDatasetAndSource) {
  auto corpus = testing::ToyCorpus({"x"}, 20, 8);
  for (size_t i = 0; i < corpus.size(); ++i) {
    corpus[i].source = i % 2 ? GenerationSource::kGpt2 : GenerationSource::kMhpg;
  }
  auto report = PerSourceCorrelation(LookupMetric("g", GoldEntries(corpus)),
                                     corpus, {});
  ASSERT_EQ(report.cells.size(), 2u);
  EXPECT_EQ(report.cells[0].source, GenerationSource::kMhpg);
  EXPECT_EQ(report.cells[0].n, 10u);
  EXPECT_NEAR(*report.cells[1].r, 1.0, 1e-12);
}

TEST(MinimalPairsTest, GoldOracleAndConstant) {
  const auto pairs = SamplePairs();
  ScoreEntries oracle;
  for (const auto& p : pairs) {
    oracle.emplace_back(PairCandidateId(p.pair_id, 1), p.score_1);
    oracle.emplace_back(PairCandidateId(p.pair_id, 2), p.score_2);
  }
  auto perfect = EvaluateMinimalPairs(LookupMetric("gold", oracle), pairs);
  EXPECT_EQ(perfect.average, 1.0);
  for (const auto& c : perfect.phenomena) EXPECT_EQ(c.accuracy, 1.0);

  auto flat = EvaluateMinimalPairs(Constant(2.0), pairs);
  EXPECT_EQ(flat.average, 0.5);
  for (const auto& c : flat.datasets) {
    EXPECT_EQ(c.ties, c.pairs());
    EXPECT_EQ(c.accuracy, 0.5);
  }
}

TEST(MinimalPairsTest, HandCountsAndComplement) {
  const auto pairs = SamplePairs();
  const auto bleu = LexicalMetric(lexical::Metric::kBleu1);
  auto report = EvaluateMinimalPairs(bleu, pairs);
  // Hand scores: p1 win (1 vs 0), p2 loss (brevity), p3 tie, p4 win, p5 tie.
  ASSERT_EQ(report.datasets.size(), 2u);
  EXPECT_EQ(report.datasets[0].key, "a");
  EXPECT_EQ(report.datasets[0].wins, 1);
  EXPECT_EQ(report.datasets[0].losses, 1);
  EXPECT_EQ(report.datasets[0].ties, 1);
  EXPECT_DOUBLE_EQ(report.datasets[0].accuracy, 0.5);
  EXPECT_EQ(report.datasets[1].wins, 1);
  EXPECT_EQ(report.datasets[1].ties, 1);
  EXPECT_DOUBLE_EQ(report.datasets[1].accuracy, 0.75);
  EXPECT_DOUBLE_EQ(report.average, 0.625);
  EXPECT_EQ(report.phenomena.size(), 3u);

  auto neg = EvaluateMinimalPairs(
      Transform(bleu, [](double s) { return -s; }, "neg"), pairs);
  auto mono = EvaluateMinimalPairs(
      Transform(bleu, [](double s) { return std::exp(3 * s); }, "exp"), pairs);
  for (size_t i = 0; i < report.datasets.size(); ++i) {
    EXPECT_DOUBLE_EQ(neg.datasets[i].accuracy, 1.0 - report.datasets[i].accuracy);
    EXPECT_DOUBLE_EQ(mono.datasets[i].accuracy, report.datasets[i].accuracy);
  }
  EXPECT_THROW(EvaluateMinimalPairs(bleu, {}), PreconditionError);
}

TEST(MinimalPairsTest, TieEpsilon) {
  std::vector<MinimalPair> pairs = {Pair("a", "p", "x", "y", Phenomenon::kOther)};
  ScoreEntries e = {{"p#1", 0.52}, {"p#2", 0.5}};
  EXPECT_EQ(EvaluateMinimalPairs(LookupMetric("m", e), pairs).datasets[0].wins, 1);
  EXPECT_EQ(
      EvaluateMinimalPairs(LookupMetric("m", e), pairs, 0.05).datasets[0].ties,
      1);
}

TEST(DivergenceTest, HandCase) {
  ScoreEntries a = {{"i1", 5}, {"i2", 3}, {"i3", 4}};
  ScoreEntries b = {{"i3", 2}, {"i1", 1}, {"i2", 3}};
  auto top = TopDivergences(a, b, 2);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_EQ(top[0].instance_id, "i1");
  EXPECT_EQ(top[0].delta, 4.0);
  EXPECT_EQ(top[0].rank, 1);
  EXPECT_EQ(top[1].instance_id, "i3");
  EXPECT_EQ(top[1].score_b, 2.0);
  EXPECT_EQ(top[1].rank, 2);
  EXPECT_EQ(TopDivergences(a, b, 10).size(), 3u);
}

TEST(DivergenceTest, TiesAndMismatch) {
  ScoreEntries a = {{"b", 1}, {"a", 2}, {"c", 0}};
  ScoreEntries b = {{"b", 0}, {"a", 1}, {"c", 0}};
  auto top = TopDivergences(a, b, 3);
  EXPECT_EQ(top[0].instance_id, "a");
  EXPECT_EQ(top[1].instance_id, "b");
  EXPECT_EQ(top[0].rank, top[1].rank);
  EXPECT_EQ(top[2].rank, 2);
  EXPECT_THROW(TopDivergences(a, {{"b", 0}, {"a", 1}}, 3), PreconditionError);
  EXPECT_THROW(TopDivergences(a, {{"b", 0}, {"a", 1}, {"d", 0}}, 3),
               PreconditionError);
}

TEST(LookupTest, MissingAndDuplicate) {
  auto m = LookupMetric("m", {{"a", 1.5}});
  EXPECT_EQ(m({"a", "", "", "", ""}), 1.5);
  EXPECT_THROW(m({"b", "", "", "", ""}), MissingScoreError);
  EXPECT_THROW(LookupMetric("m", {{"a", 1}, {"a", 2}}), ParseError);
}

TEST(LookupTest, ImportRoundTrip) {
  testing::TempDir dir;
  ScoreEntries e = {{"z", 0.125}, {"a", 1e-17}, {"m", -3.75}};
  WriteScoreFile(dir / "ext.json", e);
  EXPECT_EQ(ReadScoreFile(dir / "ext.json"), e);
  auto m = ImportExternalScores(dir / "ext.json");
  EXPECT_EQ(m.name, "import:ext.json");
  EXPECT_EQ(m({"a", "", "", "", ""}), 1e-17);
  EXPECT_EQ(m.min_score, -3.75);
  EXPECT_THROW(ImportExternalScores(dir / "missing.json"), ParseError);
}

TEST(LexicalMetricTest, MatchesDirectScore) {
  auto m = LexicalMetric(lexical::Metric::kMeteor);
  EXPECT_EQ(m({"id", "p", "q", "the cats sat", "a cat sat"}),
            lexical::ScorePair(lexical::Metric::kMeteor, "the cats sat", "a cat sat"));
}

}  // namespace
}  // namespace rceval::metaeval
