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

#ifndef RCEVAL_LEXICAL_H_
#define RCEVAL_LEXICAL_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rceval/corpus.h"

namespace rceval::lexical {

// Lowercased whitespace tokens with '?', '.' and '!' deleted.
using TokenSequence = std::vector<std::string>;

TokenSequence NormalizeTokenize(std::string_view text);

// Clipped unigram precision times brevity penalty. No smoothing.
double Bleu1(const TokenSequence& reference, const TokenSequence& candidate);

// LCS-based F-measure, F = (1 + b^2) P R / (R + b^2 P).
double RougeL(const TokenSequence& reference, const TokenSequence& candidate,
              double beta = 1.2);

int LcsLength(const TokenSequence& a, const TokenSequence& b);

// One-to-one unigram alignment. `pairs` holds (candidate index, reference
// index) sorted by candidate index.
struct MatchAlignment {
  std::vector<std::pair<int, int>> pairs;
  int chunk_count = 0;
};

// Maximal runs of consecutive pairs where both indices advance by one.
int CountChunks(const std::vector<std::pair<int, int>>& sorted_pairs);

// Exact-match stage, then (optionally) a Porter-stem stage over the tokens
// left unmatched. Each stage repeatedly takes the longest contiguous run of
// matchable unused tokens (ties: leftmost reference index, then leftmost
// candidate index), which keeps the chunk count low without changing the
// number of matches.
MatchAlignment AlignUnigrams(const TokenSequence& reference,
                             const TokenSequence& candidate, bool stemming);

struct MeteorParams {
  double fmean_weight = 9.0;
  double penalty_weight = 0.5;
  double penalty_power = 3.0;
  bool stemming = true;
};

double Meteor(const TokenSequence& reference, const TokenSequence& candidate,
              const MeteorParams& params = {});

enum class Metric { kBleu1, kRougeL, kMeteor };

std::optional<Metric> ParseMetric(std::string_view name);
std::string_view MetricName(Metric metric);

// Normalizes both strings and applies the metric.
double ScorePair(Metric metric, std::string_view reference,
                 std::string_view candidate);

// (instance_id, score) in input order.
std::vector<std::pair<std::string, double>> ScoreBatch(
    Metric metric, std::span<const JudgedInstance> instances);

}  // namespace rceval::lexical

#endif  // RCEVAL_LEXICAL_H_
