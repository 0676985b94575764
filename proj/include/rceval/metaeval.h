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

#ifndef RCEVAL_METAEVAL_H_
#define RCEVAL_METAEVAL_H_

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rceval/corpus.h"
#include "rceval/learned.h"
#include "rceval/lexical.h"
#include "rceval/score_file.h"
#include "rceval/stats.h"

namespace rceval::metaeval {

struct ScoringInput {
  std::string_view instance_id;
  std::string_view passage;
  std::string_view question;
  std::string_view reference;
  std::string_view candidate;
};

// A deterministic scorer plus its name and score range. Implementations
// must tolerate concurrent calls.
struct MetricFn {
  std::string name;
  double min_score = 0.0;
  double max_score = 1.0;
  std::function<double(const ScoringInput&)> score;

  double operator()(const ScoringInput& input) const { return score(input); }
};

MetricFn LexicalMetric(lexical::Metric metric);

// Scores with the raw (unclamped) regression output.
MetricFn LearnedMetric(std::shared_ptr<const learned::RegressionModel> model,
                       std::string name = "learned");

// Looks scores up by instance id; unknown ids throw MissingScoreError.
MetricFn LookupMetric(std::string name, const ScoreEntries& entries);

// import_external_scores: LookupMetric over a score file.
MetricFn ImportExternalScores(const std::filesystem::path& path);

// Id under which the two candidates of a minimal pair are scored by lookup
// metrics: "<pair_id>#1" and "<pair_id>#2".
std::string PairCandidateId(std::string_view pair_id, int which);

ScoringInput ToScoringInput(const JudgedInstance& instance);

// ---------------------------------------------------------------------------

struct CorrelationCell {
  std::string dataset_id;
  std::string split;  // "train" / "dev" / "test", or "all"
  size_t n = 0;
  std::optional<double> r;
  std::string undefined_reason;  // set when r is absent
};

struct CorrelationReport {
  std::string metric;
  std::vector<std::string> datasets;  // first-appearance order
  std::vector<std::string> splits;
  std::vector<CorrelationCell> cells;
  // Unweighted mean of the defined cells of each split.
  std::map<std::string, std::optional<double>> average;

  const CorrelationCell* Find(std::string_view dataset,
                              std::string_view split) const;
};

// Per (dataset, split) Pearson r between metric scores and gold scores.
// An empty `splits` set evaluates every instance under a single "all" split.
CorrelationReport EvaluateCorrelation(const MetricFn& metric,
                                      std::span<const JudgedInstance> instances,
                                      const std::set<Split>& splits);

struct SourceCorrelationCell {
  std::string dataset_id;
  GenerationSource source = GenerationSource::kOther;
  size_t n = 0;
  std::optional<double> r;
  std::string undefined_reason;
};

struct SourceCorrelationReport {
  std::string metric;
  std::vector<SourceCorrelationCell> cells;
};

SourceCorrelationReport PerSourceCorrelation(
    const MetricFn& metric, std::span<const JudgedInstance> instances,
    const std::set<Split>& splits);

// ---------------------------------------------------------------------------

struct PreferenceCell {
  std::string key;  // dataset_id or phenomenon name
  int wins = 0;
  int ties = 0;
  int losses = 0;
  double accuracy = 0.0;  // (wins + ties / 2) / pairs

  int pairs() const { return wins + ties + losses; }
};

struct PreferenceReport {
  std::string metric;
  std::vector<PreferenceCell> datasets;
  std::vector<PreferenceCell> phenomena;
  double average = 0.0;  // unweighted mean over datasets
};

// Win when metric(c1) > metric(c2) + epsilon, tie when the two scores are
// within `tie_epsilon` (exact equality by default).
PreferenceReport EvaluateMinimalPairs(const MetricFn& metric,
                                      std::span<const MinimalPair> pairs,
                                      double tie_epsilon = 0.0);

// ---------------------------------------------------------------------------

struct DivergenceEntry {
  std::string instance_id;
  double score_a = 0.0;
  double score_b = 0.0;
  double delta = 0.0;
  int rank = 0;
};

// Top-k by |a - b| descending, ties by instance id. Both maps must cover the
// same ids.
std::vector<DivergenceEntry> TopDivergences(const ScoreEntries& scores_a,
                                            const ScoreEntries& scores_b,
                                            size_t k);

}  // namespace rceval::metaeval

#endif  // RCEVAL_METAEVAL_H_
