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

#include <map>
#include <set>

#include "gtest/gtest.h"
#include "oracles.h"
#include "rceval/corpus.h"
#include "rceval/random.h"

namespace rceval {
namespace {

MCExample Mc(int options, std::set<int> correct) {
  MCExample mc;
  mc.passage = "p";
  mc.question = "q";
  for (int i = 0; i < options; ++i) mc.options.push_back("opt" + std::to_string(i));
  mc.correct_indices = std::move(correct);
  return mc;
}

int IndexOf(const MCExample& mc, const std::string& text) {
  for (int i = 0; i < static_cast<int>(mc.options.size()); ++i) {
    if (mc.options[i] == text) return i;
  }
  return -1;
}

// Checks labels and counts against the enumerated expectation.
void ExpectMatchesOracle(const MCExample& mc,
                         const std::vector<PretrainExample>& got) {
  const auto expected = testing::ExpectedPretrain(mc);
  ASSERT_EQ(got.size(), expected.total);
  std::map<std::pair<int, int>, int> mixed;
  int both = 0;
  for (const auto& ex : got) {
    EXPECT_EQ(ex.passage, mc.passage);
    EXPECT_EQ(ex.question, mc.question);
    const int a = IndexOf(mc, ex.answer_1);
    const int b = IndexOf(mc, ex.answer_2);
    ASSERT_GE(a, 0);
    ASSERT_GE(b, 0);
    const bool a_ok = mc.correct_indices.count(a) != 0;
    const bool b_ok = mc.correct_indices.count(b) != 0;
    if (ex.label == PretrainLabel::kBothCorrect) {
      ++both;
      EXPECT_EQ(std::make_pair(a, b), expected.both_correct);
    } else {
      EXPECT_NE(a_ok, b_ok);
      EXPECT_EQ(ex.label, a_ok ? PretrainLabel::kFirstCorrect
                               : PretrainLabel::kSecondCorrect);
      mixed[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  EXPECT_EQ(both, 1);
  EXPECT_EQ(mixed, expected.mixed_pairs);
}

TEST(BuildPretrainExamplesTest, SingleCorrectTwoDistractors) {
  MCExample mc;
  mc.passage = "p";
  mc.question = "capital?";
  mc.options = {"Paris", "London", "Rome"};
  mc.correct_indices = {0};
  Rng rng(1);
  auto got = BuildPretrainExamples(mc, rng);
  ASSERT_EQ(got.size(), 3u);
  ExpectMatchesOracle(mc, got);
  int both = 0;
  for (const auto& ex : got) {
    if (ex.label == PretrainLabel::kBothCorrect) {
      ++both;
      EXPECT_EQ(ex.answer_1, "Paris");
      EXPECT_EQ(ex.answer_2, "Paris");
    }
  }
  EXPECT_EQ(both, 1);
}

TEST(BuildPretrainExamplesTest, OnlyCorrectAnswers) {
  Rng rng(2);
  auto one = BuildPretrainExamples(Mc(1, {0}), rng);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].answer_1, "opt0");
  EXPECT_EQ(one[0].answer_2, "opt0");
  EXPECT_EQ(one[0].label, PretrainLabel::kBothCorrect);
  auto two = BuildPretrainExamples(Mc(2, {0, 1}), rng);
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].answer_1, "opt0");
  EXPECT_EQ(two[0].answer_2, "opt1");
}

TEST(BuildPretrainExamplesTest, ExhaustiveSmallCases) {
  int cases = 0;
  for (int n = 1; n <= 4; ++n) {
    for (int mask = 1; mask < (1 << n); ++mask) {
      std::set<int> correct;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) correct.insert(i);
      }
      const MCExample mc = Mc(n, correct);
      for (uint64_t seed = 0; seed < 8; ++seed) {
        Rng rng(seed);
        ExpectMatchesOracle(mc, BuildPretrainExamples(mc, rng));
      }
      ++cases;
    }
  }
  EXPECT_EQ(cases, 1 + 3 + 7 + 15);
}

TEST(BuildPretrainExamplesTest, OrderDependsOnRng) {
  const MCExample mc = Mc(4, {0});
  std::set<PretrainLabel> labels;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    for (const auto& ex : BuildPretrainExamples(mc, rng)) labels.insert(ex.label);
  }
  EXPECT_EQ(labels.size(), 3u);
  Rng a(5), b(5);
  EXPECT_EQ(BuildPretrainExamples(mc, a), BuildPretrainExamples(mc, b));
}

}  // namespace
}  // namespace rceval
