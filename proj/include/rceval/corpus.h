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

#ifndef RCEVAL_CORPUS_H_
#define RCEVAL_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace rceval {

enum class GenerationSource {
  kBacktranslation,
  kGpt2,
  kMhpg,
  kSecondReference,
  kSpanModel,
  kOther,
};

enum class Split { kTrain, kDev, kTest };

enum class Phenomenon {
  kCoreference,
  kHyponymy,
  kNegation,
  kSemanticRole,
  kSyntax,
  kWordSense,
  kOther,
};

std::string_view ToString(GenerationSource source);
std::string_view ToString(Split split);
std::string_view ToString(Phenomenon phenomenon);
GenerationSource ParseGenerationSource(std::string_view name);
std::optional<Split> ParseSplit(std::string_view name);
std::optional<Phenomenon> ParsePhenomenon(std::string_view name);

// One (passage, question, reference, candidate) tuple with its human
// judgments. `gold_score` is absent only in prediction-input files.
struct JudgedInstance {
  std::string dataset_id;
  std::string instance_id;
  std::string passage;
  std::string question;
  std::string reference;
  std::string candidate;
  GenerationSource source = GenerationSource::kOther;
  std::vector<int> annotations;
  std::optional<double> gold_score;
  std::optional<Split> split;

  bool operator==(const JudgedInstance&) const = default;
};

// Two candidates for one question; candidate_1 is strictly better.
struct MinimalPair {
  std::string dataset_id;
  std::string pair_id;
  std::string passage;
  std::string question;
  std::string reference;
  std::string candidate_1;
  std::string candidate_2;
  double score_1 = 0.0;
  double score_2 = 0.0;
  Phenomenon phenomenon = Phenomenon::kOther;

  bool operator==(const MinimalPair&) const = default;
};

struct MCExample {
  std::string passage;
  std::string question;
  std::vector<std::string> options;
  std::set<int> correct_indices;

  bool operator==(const MCExample&) const = default;
};

enum class PretrainLabel { kFirstCorrect = 0, kSecondCorrect = 1, kBothCorrect = 2 };

struct PretrainExample {
  std::string passage;
  std::string question;
  std::string answer_1;
  std::string answer_2;
  PretrainLabel label = PretrainLabel::kBothCorrect;

  bool operator==(const PretrainExample&) const = default;
};

// Per-unit (annotator_id, score) lists.
class AnnotationTable {
 public:
  void Add(const std::string& unit_id, const std::string& annotator_id,
           int score);
  const std::map<std::string, std::vector<std::pair<std::string, int>>>&
  units() const {
    return units_;
  }

 private:
  std::map<std::string, std::vector<std::pair<std::string, int>>> units_;
};

// ---------------------------------------------------------------------------
// Loading and writing.

struct ValidationIssue {
  std::string record_id;  // "<dataset_id>/<instance_id>" or "#<index>"
  std::string invariant;
  std::string message;
};

struct LoadOptions {
  // Abort on the first validation issue instead of skipping the record.
  bool strict = false;
  // Accept judged records with neither "score" nor "annotations".
  bool allow_unscored = false;
};

template <typename T>
struct LoadResult {
  std::vector<T> records;
  std::vector<ValidationIssue> issues;
};

// Judged corpus: {dataset_id: {instance_id: {...}}}. Malformed JSON or a
// structurally wrong file throws ParseError; per-record invariant failures
// are collected as issues (or thrown as ValidationError when strict).
LoadResult<JudgedInstance> LoadJudged(const std::filesystem::path& path,
                                      const LoadOptions& options = {});
LoadResult<JudgedInstance> ParseJudged(std::string_view text,
                                       const LoadOptions& options = {});
LoadResult<MinimalPair> LoadMinimalPairs(const std::filesystem::path& path,
                                         const LoadOptions& options = {});
LoadResult<MinimalPair> ParseMinimalPairs(std::string_view text,
                                          const LoadOptions& options = {});
LoadResult<MCExample> LoadMultipleChoice(const std::filesystem::path& path,
                                         const LoadOptions& options = {});
LoadResult<MCExample> ParseMultipleChoice(std::string_view text,
                                          const LoadOptions& options = {});

// Writers emit leaf keys in the canonical order and group records by
// dataset_id in first-appearance order.
std::string SerializeJudged(std::span<const JudgedInstance> instances);
std::string SerializeMinimalPairs(std::span<const MinimalPair> pairs);
std::string SerializeMultipleChoice(std::span<const MCExample> examples);
void WriteJudged(const std::filesystem::path& path,
                 std::span<const JudgedInstance> instances);
void WriteMinimalPairs(const std::filesystem::path& path,
                       std::span<const MinimalPair> pairs);

std::string ReadFileToString(const std::filesystem::path& path);
void WriteStringToFile(const std::filesystem::path& path,
                       std::string_view contents);

// ---------------------------------------------------------------------------
// Aggregation, filters, splits.

// Arithmetic mean; throws PreconditionError on an empty list or a value
// outside 1..5.
double AggregateGold(std::span<const int> annotations);

// Optional sign, digits (with optional thousands commas), optional single
// decimal part. Number words are not numeric.
bool IsNumericToken(std::string_view token);

bool IsExactMatch(const JudgedInstance& instance);
bool IsNumericPair(const JudgedInstance& instance);

std::vector<JudgedInstance> FilterExactMatch(
    std::span<const JudgedInstance> instances);
std::vector<JudgedInstance> FilterNumericPairs(
    std::span<const JudgedInstance> instances);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

// Splits[i] is the split for instances[i]. Passages (normalized text within
// a dataset_id) are shuffled with `seed` and assigned greedily to the split
// with the largest remaining instance deficit.
std::vector<Split> SplitByPassage(std::span<const JudgedInstance> instances,
                                  const SplitRatios& ratios, uint64_t seed);

// Normalized passage key used for split identity.
std::string PassageKey(std::string_view passage);

// Interval-metric Krippendorff's alpha over pairable values.
double KrippendorffAlpha(const AnnotationTable& table);

// One example per (correct, distractor) combination in a random order, plus
// one BOTH_CORRECT example per question.
std::vector<PretrainExample> BuildPretrainExamples(const MCExample& mc,
                                                   std::mt19937_64& rng);

struct CorpusStatsCell {
  int passages = 0;
  int question_reference_pairs = 0;
  int candidates = 0;
  double mean_passage_tokens = 0.0;
  double mean_question_tokens = 0.0;
  double mean_reference_tokens = 0.0;
  double mean_candidate_tokens = 0.0;
};

struct CorpusStatistics {
  // Keyed by (dataset_id, split name); records without a split are keyed
  // under "unassigned".
  std::map<std::pair<std::string, std::string>, CorpusStatsCell> cells;
  std::map<std::string, CorpusStatsCell> totals_by_split;
};

CorpusStatistics ComputeCorpusStatistics(
    std::span<const JudgedInstance> instances);

}  // namespace rceval

#endif  // RCEVAL_CORPUS_H_
