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

#include "rceval/lexical.h"

#include <cmath>
#include <set>

#include "gtest/gtest.h"
#include "rceval/porter_stemmer.h"
#include "rceval/random.h"
#include "test_util.h"

namespace rceval::lexical {
namespace {

constexpr char kExampleReference[] = "soundproofed";
constexpr char kExampleCandidate[] =
    "They are heavily soundproofed to prevent the accused from hearing "
    "what's behind each one.";

TokenSequence T(std::initializer_list<const char*> words) {
  return TokenSequence(words.begin(), words.end());
}

TEST(NormalizeTokenizeTest, Rules) {
  EXPECT_EQ(NormalizeTokenize("They are soundproofed."),
            T({"they", "are", "soundproofed"}));
  EXPECT_EQ(NormalizeTokenize("Who?  Me!"), T({"who", "me"}));
  EXPECT_EQ(NormalizeTokenize("18"), T({"18"}));
  EXPECT_TRUE(NormalizeTokenize("").empty());
  EXPECT_TRUE(NormalizeTokenize(" ?!. ").empty());
  EXPECT_EQ(NormalizeTokenize("what's, 1,000"), T({"what's,", "1,000"}));
}

TEST(Bleu1Test, HandCases) {
  EXPECT_DOUBLE_EQ(Bleu1(T({"a", "b"}), T({"a", "b"})), 1.0);
  EXPECT_NEAR(Bleu1(T({"a"}), T({"a", "a", "a"})), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(Bleu1(T({"a", "b", "c"}), T({"a"})), std::exp(-2.0), 1e-9);
  EXPECT_NEAR(Bleu1(T({"a", "b", "c"}), T({"a"})), 0.1353, 1e-4);
  EXPECT_EQ(Bleu1(T({"a"}), T({})), 0.0);
  EXPECT_EQ(Bleu1(T({}), T({})), 0.0);
  EXPECT_EQ(Bleu1(T({"a"}), T({"b"})), 0.0);
}

TEST(RougeLTest, HandCases) {
  EXPECT_DOUBLE_EQ(RougeL(T({"a", "b"}), T({"a", "b"})), 1.0);
  EXPECT_NEAR(RougeL(T({"a", "b", "c"}), T({"a", "c"})), 0.7722, 1e-4);
  EXPECT_EQ(RougeL(T({"a"}), T({"b"})), 0.0);
  EXPECT_EQ(RougeL(T({}), T({"b"})), 0.0);
}

int BruteForceLcs(const TokenSequence& a, const TokenSequence& b) {
  int best = 0;
  for (unsigned mask = 0; mask < (1u << a.size()); ++mask) {
    TokenSequence sub;
    for (size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    size_t j = 0;
    for (size_t k = 0; k < b.size() && j < sub.size(); ++k) {
      if (b[k] == sub[j]) ++j;
    }
    if (j == sub.size()) best = std::max(best, static_cast<int>(sub.size()));
  }
  return best;
}

double RougeFromLcs(int l, size_t ref, size_t cand, double beta) {
  if (l == 0 || ref == 0 || cand == 0) return 0.0;
  const double p = static_cast<double>(l) / static_cast<double>(cand);
  const double r = static_cast<double>(l) / static_cast<double>(ref);
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

TokenSequence RandomTokens(Rng& rng, size_t max_len) {
  static const char* alphabet[] = {"a", "b", "c", "d"};
  TokenSequence out(UniformIndex(rng, max_len + 1));
  for (auto& t : out) t = alphabet[UniformIndex(rng, 4)];
  return out;
}

TEST(RougeLTest, MatchesBruteForceLcs) {
  Rng rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = RandomTokens(rng, 8);
    const auto b = RandomTokens(rng, 8);
    const int l = BruteForceLcs(a, b);
    ASSERT_EQ(LcsLength(a, b), l);
    ASSERT_EQ(RougeL(a, b), RougeFromLcs(l, a.size(), b.size(), 1.2));
  }
}

TEST(MeteorTest, HandCases) {
  EXPECT_EQ(Meteor(T({"a"}), T({"b"})), 0.0);
  EXPECT_NEAR(Meteor(T({"a", "b", "c"}), T({"a", "b", "c"})),
              1.0 - 0.5 / 27.0, 1e-9);
  EXPECT_NEAR(Meteor(T({"a", "b", "c"}), T({"a", "b", "c"})), 0.98148, 1e-5);
  EXPECT_NEAR(Meteor(T({"a", "b"}), T({"b", "a"})), 0.5, 1e-9);
}

TEST(MeteorTest, StemStage) {
  const auto ref = T({"the", "dogs", "barked"});
  const auto cand = T({"the", "dog", "barking"});
  EXPECT_EQ(AlignUnigrams(ref, cand, false).pairs.size(), 1u);
  EXPECT_EQ(AlignUnigrams(ref, cand, true).pairs.size(), 3u);
  MeteorParams exact_only;
  exact_only.stemming = false;
  EXPECT_LT(Meteor(ref, cand, exact_only), Meteor(ref, cand));
}

TEST(MeteorTest, PrefersContiguousAlignment) {
  const auto ref = T({"a", "b", "x", "a", "b"});
  const auto cand = T({"a", "b"});
  const auto alignment = AlignUnigrams(ref, cand, false);
  EXPECT_EQ(alignment.chunk_count, 1);
  ASSERT_EQ(alignment.pairs.size(), 2u);
  EXPECT_EQ(alignment.pairs[0], std::make_pair(0, 0));
  EXPECT_EQ(alignment.pairs[1], std::make_pair(1, 1));
}

TEST(MeteorTest, AlignmentProperties) {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const auto ref = RandomTokens(rng, 8);
    const auto cand = RandomTokens(rng, 8);
    const auto al = AlignUnigrams(ref, cand, true);
    std::set<int> used_c, used_r;
    for (size_t i = 0; i < al.pairs.size(); ++i) {
      EXPECT_TRUE(used_c.insert(al.pairs[i].first).second);
      EXPECT_TRUE(used_r.insert(al.pairs[i].second).second);
      if (i > 0) EXPECT_LT(al.pairs[i - 1].first, al.pairs[i].first);
    }
    if (al.pairs.empty()) {
      EXPECT_EQ(al.chunk_count, 0);
    } else {
      EXPECT_GE(al.chunk_count, 1);
      EXPECT_LE(al.chunk_count, static_cast<int>(al.pairs.size()));
      EXPECT_EQ(al.chunk_count, CountChunks(al.pairs));
    }
    const double m = Meteor(ref, cand);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 1.0);
  }
}

TEST(CountChunksTest, Runs) {
  EXPECT_EQ(CountChunks({}), 0);
  EXPECT_EQ(CountChunks({{0, 0}, {1, 1}, {2, 2}}), 1);
  EXPECT_EQ(CountChunks({{0, 1}, {1, 0}}), 2);
  EXPECT_EQ(CountChunks({{0, 0}, {1, 1}, {3, 2}, {4, 5}}), 3);
}

TEST(LexicalAnchorTest, ExampleAnswer) {
  const auto ref = NormalizeTokenize(kExampleReference);
  const auto cand = NormalizeTokenize(kExampleCandidate);
  ASSERT_EQ(cand.size(), 14u);
  EXPECT_NEAR(Bleu1(ref, cand), 1.0 / 14.0, 1e-12);
  EXPECT_NEAR(Bleu1(ref, cand), 0.07, 0.01);
  EXPECT_NEAR(RougeL(ref, cand), 0.15, 0.02);
  EXPECT_NEAR(Meteor(ref, cand), 0.5 * 10.0 / 23.0, 1e-12);
  EXPECT_NEAR(Meteor(ref, cand), 0.17, 0.06);
}

TEST(MetricBoundsTest, IdenticalSequences) {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = RandomTokens(rng, 8);
    if (s.empty()) continue;
    EXPECT_DOUBLE_EQ(Bleu1(s, s), 1.0);
    EXPECT_DOUBLE_EQ(RougeL(s, s), 1.0);
    const double n = static_cast<double>(s.size());
    EXPECT_NEAR(Meteor(s, s), 1.0 - 0.5 / (n * n * n), 1e-12);
  }
}

TEST(ScoreBatchTest, MatchesSingleCalls) {
  std::vector<JudgedInstance> batch = {
      testing::Judged("d", "1", "the cat sat", "the cat"),
      testing::Judged("d", "2", "a b c", "c b a"),
      testing::Judged("d", "3", "18", "18")};
  for (auto m : {Metric::kBleu1, Metric::kRougeL, Metric::kMeteor}) {
    auto scores = ScoreBatch(m, batch);
    ASSERT_EQ(scores.size(), 3u);
    for (size_t i = 0; i < batch.size(); ++i) {
      EXPECT_EQ(scores[i].first, batch[i].instance_id);
      EXPECT_EQ(scores[i].second,
                ScorePair(m, batch[i].reference, batch[i].candidate));
    }
  }
  EXPECT_TRUE(ScoreBatch(Metric::kBleu1, {}).empty());
  EXPECT_EQ(ScoreBatch(Metric::kBleu1, batch)[2].second, 1.0);
}

TEST(ScoreBatchTest, PunctuationInvariance) {
  Rng rng(13);
  const char* marks[] = {"?", ".", "!"};
  for (int trial = 0; trial < 100; ++trial) {
    const std::string ref = testing::RandomWords(rng, 1 + UniformIndex(rng, 5));
    const std::string cand = testing::RandomWords(rng, 1 + UniformIndex(rng, 5));
    const std::string noisy = cand + marks[UniformIndex(rng, 3)];
    for (auto m : {Metric::kBleu1, Metric::kMeteor}) {
      EXPECT_EQ(ScorePair(m, ref, cand), ScorePair(m, ref + ".", noisy));
    }
  }
}

TEST(MetricNameTest, ParseRoundTrip) {
  for (auto m : {Metric::kBleu1, Metric::kRougeL, Metric::kMeteor}) {
    EXPECT_EQ(ParseMetric(MetricName(m)), m);
  }
  EXPECT_FALSE(ParseMetric("bleu4").has_value());
}

TEST(PorterStemTest, ReferenceVocabulary) {
  const std::pair<const char*, const char*> cases[] = {
      {"caresses", "caress"},    {"ponies", "poni"},
      {"ties", "ti"},            {"caress", "caress"},
      {"cats", "cat"},           {"feed", "feed"},
      {"agreed", "agre"},        {"plastered", "plaster"},
      {"motoring", "motor"},     {"sing", "sing"},
      {"conflated", "conflat"},  {"troubled", "troubl"},
      {"sized", "size"},         {"hopping", "hop"},
      {"tanned", "tan"},         {"falling", "fall"},
      {"hissing", "hiss"},       {"fizzed", "fizz"},
      {"failing", "fail"},       {"filing", "file"},
      {"happy", "happi"},        {"sky", "sky"},
      {"relational", "relat"},   {"conditional", "condit"},
      {"rational", "ration"},    {"digitizer", "digit"},
      {"operator", "oper"},      {"feudalism", "feudal"},
      {"decisiveness", "decis"}, {"hopefulness", "hope"},
      {"callousness", "callous"}, {"triplicate", "triplic"},
      {"formative", "form"},     {"formalize", "formal"},
      {"electrical", "electr"},  {"hopeful", "hope"},
      {"goodness", "good"},      {"revival", "reviv"},
      {"allowance", "allow"},    {"inference", "infer"},
      {"airliner", "airlin"},    {"gyroscopic", "gyroscop"},
      {"adjustable", "adjust"},  {"defensible", "defens"},
      {"irritant", "irrit"},     {"replacement", "replac"},
      {"adjustment", "adjust"},  {"dependent", "depend"},
      {"adoption", "adopt"},     {"communism", "commun"},
      {"activate", "activ"},     {"effective", "effect"},
      {"bowdlerize", "bowdler"}, {"probate", "probat"},
      {"rate", "rate"},          {"cease", "ceas"},
      {"controll", "control"},   {"roll", "roll"},
      {"generalizations", "gener"}, {"oscillators", "oscil"},
      {"sensibiliti", "sensibl"}, {"analogousli", "analog"},
  };
  for (const auto& [word, stem] : cases) {
    EXPECT_EQ(PorterStem(word), stem) << word;
  }
  EXPECT_EQ(PorterStem("a"), "a");
  EXPECT_EQ(PorterStem("what's"), "what's");
  EXPECT_EQ(PorterStem("18"), "18");
}

}  // namespace
}  // namespace rceval::lexical
