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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "rceval/porter_stemmer.h"

namespace rceval::lexical {

TokenSequence NormalizeTokenize(std::string_view text) {
  TokenSequence tokens;
  std::string current;
  for (char c : text) {
    if (c == '?' || c == '.' || c == '!') continue;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

double Bleu1(const TokenSequence& reference, const TokenSequence& candidate) {
  if (candidate.empty() || reference.empty()) return 0.0;
  std::unordered_map<std::string_view, int> ref_counts;
  for (const auto& t : reference) ++ref_counts[t];
  std::unordered_map<std::string_view, int> cand_counts;
  for (const auto& t : candidate) ++cand_counts[t];
  int clipped = 0;
  for (const auto& [token, count] : cand_counts) {
    auto it = ref_counts.find(token);
    if (it != ref_counts.end()) clipped += std::min(count, it->second);
  }
  if (clipped == 0) return 0.0;
  const double precision =
      static_cast<double>(clipped) / static_cast<double>(candidate.size());
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c >= r ? 1.0 : std::exp(1.0 - r / c);
  return precision * bp;
}

int LcsLength(const TokenSequence& a, const TokenSequence& b) {
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double RougeL(const TokenSequence& reference, const TokenSequence& candidate,
              double beta) {
  if (reference.empty() || candidate.empty()) return 0.0;
  const int lcs = LcsLength(reference, candidate);
  if (lcs == 0) return 0.0;
  const double p = static_cast<double>(lcs) / candidate.size();
  const double r = static_cast<double>(lcs) / reference.size();
  const double b2 = beta * beta;
  return (1.0 + b2) * p * r / (r + b2 * p);
}

int CountChunks(const std::vector<std::pair<int, int>>& sorted_pairs) {
  if (sorted_pairs.empty()) return 0;
  int chunks = 1;
  for (size_t i = 1; i < sorted_pairs.size(); ++i) {
    const auto& [c0, r0] = sorted_pairs[i - 1];
    const auto& [c1, r1] = sorted_pairs[i];
    if (c1 != c0 + 1 || r1 != r0 + 1) ++chunks;
  }
  return chunks;
}

namespace {

void AlignStage(const TokenSequence& ref, const TokenSequence& cand,
                std::vector<bool>& ref_used, std::vector<bool>& cand_used,
                std::vector<std::pair<int, int>>& pairs) {
  const int n = static_cast<int>(cand.size());
  const int m = static_cast<int>(ref.size());
  while (true) {
    int best_len = 0, best_i = -1, best_j = -1;
    for (int j = 0; j < m; ++j) {
      if (ref_used[j]) continue;
      for (int i = 0; i < n; ++i) {
        if (cand_used[i]) continue;
        int len = 0;
        while (i + len < n && j + len < m && !cand_used[i + len] &&
               !ref_used[j + len] && cand[i + len] == ref[j + len]) {
          ++len;
        }
        if (len > best_len) {
          best_len = len;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_len == 0) return;
    for (int t = 0; t < best_len; ++t) {
      cand_used[best_i + t] = true;
      ref_used[best_j + t] = true;
      pairs.emplace_back(best_i + t, best_j + t);
    }
  }
}

}  // namespace

MatchAlignment AlignUnigrams(const TokenSequence& reference,
                             const TokenSequence& candidate, bool stemming) {
  std::vector<bool> ref_used(reference.size(), false);
  std::vector<bool> cand_used(candidate.size(), false);
  MatchAlignment alignment;
  AlignStage(reference, candidate, ref_used, cand_used, alignment.pairs);
  if (stemming) {
    TokenSequence ref_stems, cand_stems;
    ref_stems.reserve(reference.size());
    cand_stems.reserve(candidate.size());
    for (const auto& t : reference) ref_stems.push_back(PorterStem(t));
    for (const auto& t : candidate) cand_stems.push_back(PorterStem(t));
    AlignStage(ref_stems, cand_stems, ref_used, cand_used, alignment.pairs);
  }
  std::sort(alignment.pairs.begin(), alignment.pairs.end());
  alignment.chunk_count = CountChunks(alignment.pairs);
  return alignment;
}

double Meteor(const TokenSequence& reference, const TokenSequence& candidate,
              const MeteorParams& params) {
  const MatchAlignment alignment =
      AlignUnigrams(reference, candidate, params.stemming);
  const double matches = static_cast<double>(alignment.pairs.size());
  if (matches == 0.0) return 0.0;
  const double p = matches / candidate.size();
  const double r = matches / reference.size();
  const double w = params.fmean_weight;
  const double fmean = (1.0 + w) * p * r / (r + w * p);
  const double penalty =
      params.penalty_weight *
      std::pow(alignment.chunk_count / matches, params.penalty_power);
  return fmean * (1.0 - penalty);
}

std::optional<Metric> ParseMetric(std::string_view name) {
  if (name == "bleu1") return Metric::kBleu1;
  if (name == "rouge_l") return Metric::kRougeL;
  if (name == "meteor") return Metric::kMeteor;
  return std::nullopt;
}

std::string_view MetricName(Metric metric) {
  switch (metric) {
    case Metric::kBleu1:
      return "bleu1";
    case Metric::kRougeL:
      return "rouge_l";
    case Metric::kMeteor:
      return "meteor";
  }
  return "unknown";
}

double ScorePair(Metric metric, std::string_view reference,
                 std::string_view candidate) {
  const TokenSequence ref = NormalizeTokenize(reference);
  const TokenSequence cand = NormalizeTokenize(candidate);
  switch (metric) {
    case Metric::kBleu1:
      return Bleu1(ref, cand);
    case Metric::kRougeL:
      return RougeL(ref, cand);
    case Metric::kMeteor:
      return Meteor(ref, cand);
  }
  return 0.0;
}

std::vector<std::pair<std::string, double>> ScoreBatch(
    Metric metric, std::span<const JudgedInstance> instances) {
  std::vector<std::pair<std::string, double>> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    out.emplace_back(inst.instance_id,
                     ScorePair(metric, inst.reference, inst.candidate));
  }
  return out;
}

}  // namespace rceval::lexical
