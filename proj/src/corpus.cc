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

#include "rceval/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "rceval/errors.h"
#include "rceval/hashing.h"
#include "rceval/lexical.h"
#include "rceval/random.h"

namespace rceval {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kGoldTolerance = 1e-9;

struct SourceName {
  GenerationSource source;
  std::string_view name;
};
constexpr SourceName kSourceNames[] = {
    {GenerationSource::kBacktranslation, "backtranslation"},
    {GenerationSource::kGpt2, "gpt2"},
    {GenerationSource::kMhpg, "mhpg"},
    {GenerationSource::kSecondReference, "second_reference"},
    {GenerationSource::kSpanModel, "span_model"},
    {GenerationSource::kOther, "other"},
};

struct PhenomenonName {
  Phenomenon phenomenon;
  std::string_view name;
};
constexpr PhenomenonName kPhenomenonNames[] = {
    {Phenomenon::kCoreference, "coreference"},
    {Phenomenon::kHyponymy, "hyponymy"},
    {Phenomenon::kNegation, "negation"},
    {Phenomenon::kSemanticRole, "semantic_role"},
    {Phenomenon::kSyntax, "syntax"},
    {Phenomenon::kWordSense, "word_sense"},
    {Phenomenon::kOther, "other"},
};

std::string Lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

int LineOfByte(std::string_view text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(
                 std::count(text.begin(), text.begin() + byte, '\n'));
}

ordered_json ParseDocument(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("line " + std::to_string(LineOfByte(text, e.byte)),
                     e.what());
  }
}

const ordered_json& RequireObject(const ordered_json& j,
                                  const std::string& locus) {
  if (!j.is_object()) throw ParseError(locus, "expected a JSON object");
  return j;
}

std::string RequireString(const ordered_json& leaf, const char* key,
                          const std::string& locus) {
  auto it = leaf.find(key);
  if (it == leaf.end() || !it->is_string()) {
    throw ParseError(locus, std::string("missing or non-string field \"") +
                                key + "\"");
  }
  return it->get<std::string>();
}

double RequireNumber(const ordered_json& leaf, const char* key,
                     const std::string& locus) {
  auto it = leaf.find(key);
  if (it == leaf.end() || !it->is_number()) {
    throw ParseError(locus, std::string("missing or non-numeric field \"") +
                                key + "\"");
  }
  return it->get<double>();
}

// Issue collector honoring the strict flag.
class Issues {
 public:
  explicit Issues(bool strict) : strict_(strict) {}

  void Report(std::string record_id, std::string invariant,
              std::string message) {
    if (strict_) throw ValidationError(record_id, invariant, message);
    issues_.push_back(
        {std::move(record_id), std::move(invariant), std::move(message)});
  }

  std::vector<ValidationIssue> Take() { return std::move(issues_); }

 private:
  bool strict_;
  std::vector<ValidationIssue> issues_;
};

std::string CollapseWhitespace(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string_view ToString(GenerationSource source) {
  for (const auto& s : kSourceNames) {
    if (s.source == source) return s.name;
  }
  return "other";
}

std::string_view ToString(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "train";
}

std::string_view ToString(Phenomenon phenomenon) {
  for (const auto& p : kPhenomenonNames) {
    if (p.phenomenon == phenomenon) return p.name;
  }
  return "other";
}

GenerationSource ParseGenerationSource(std::string_view name) {
  const std::string lower = Lower(name);
  for (const auto& s : kSourceNames) {
    if (s.name == lower) return s.source;
  }
  if (lower == "gpt-2") return GenerationSource::kGpt2;
  return GenerationSource::kOther;
}

std::optional<Split> ParseSplit(std::string_view name) {
  const std::string lower = Lower(name);
  if (lower == "train") return Split::kTrain;
  if (lower == "dev" || lower == "validation" || lower == "val") {
    return Split::kDev;
  }
  if (lower == "test") return Split::kTest;
  return std::nullopt;
}

std::optional<Phenomenon> ParsePhenomenon(std::string_view name) {
  const std::string lower = Lower(name);
  for (const auto& p : kPhenomenonNames) {
    if (p.name == lower) return p.phenomenon;
  }
  return std::nullopt;
}

void AnnotationTable::Add(const std::string& unit_id,
                          const std::string& annotator_id, int score) {
  if (score < 1 || score > 5) {
    throw PreconditionError("annotation score " + std::to_string(score) +
                            " outside 1..5 for unit " + unit_id);
  }
  units_[unit_id].emplace_back(annotator_id, score);
}

std::string ReadFileToString(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteStringToFile(const std::filesystem::path& path,
                       std::string_view contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Judged corpus.

LoadResult<JudgedInstance> ParseJudged(std::string_view text,
                                       const LoadOptions& options) {
  const ordered_json doc = ParseDocument(text);
  RequireObject(doc, "top level");
  LoadResult<JudgedInstance> result;
  Issues issues(options.strict);
  std::unordered_set<std::string> seen_ids;

  for (const auto& [dataset_id, instances] : doc.items()) {
    RequireObject(instances, dataset_id);
    for (const auto& [instance_id, leaf] : instances.items()) {
      const std::string locus = dataset_id + "/" + instance_id;
      RequireObject(leaf, locus);
      JudgedInstance inst;
      inst.dataset_id = dataset_id;
      inst.instance_id = instance_id;
      inst.passage = RequireString(leaf, "context", locus);
      inst.question = RequireString(leaf, "question", locus);
      inst.reference = RequireString(leaf, "reference", locus);
      inst.candidate = RequireString(leaf, "candidate", locus);

      bool valid = true;
      if (auto it = leaf.find("annotations"); it != leaf.end()) {
        if (!it->is_array()) throw ParseError(locus, "annotations not an array");
        for (const auto& a : *it) {
          if (!a.is_number()) {
            throw ParseError(locus, "non-numeric annotation");
          }
          const double v = a.get<double>();
          if (v != std::floor(v) || v < 1 || v > 5) {
            issues.Report(locus, "annotation range",
                          "annotation " + a.dump() +
                              " is not an integer in 1..5");
            valid = false;
            break;
          }
          inst.annotations.push_back(static_cast<int>(v));
        }
      }
      if (!valid) continue;

      if (auto it = leaf.find("score"); it != leaf.end()) {
        if (!it->is_number()) throw ParseError(locus, "non-numeric score");
        inst.gold_score = it->get<double>();
        if (*inst.gold_score < 1.0 || *inst.gold_score > 5.0) {
          issues.Report(locus, "gold range",
                        "score " + it->dump() + " outside [1, 5]");
          continue;
        }
        if (!inst.annotations.empty()) {
          const double mean = AggregateGold(inst.annotations);
          if (std::abs(mean - *inst.gold_score) > kGoldTolerance) {
            issues.Report(locus, "gold mean",
                          "score " + it->dump() +
                              " differs from the annotation mean");
            continue;
          }
        }
      } else if (!inst.annotations.empty()) {
        inst.gold_score = AggregateGold(inst.annotations);
      } else if (!options.allow_unscored) {
        issues.Report(locus, "missing gold",
                      "record has neither score nor annotations");
        continue;
      }

      if (auto it = leaf.find("metadata"); it != leaf.end() && it->is_object()) {
        if (auto src = it->find("source"); src != it->end() && src->is_string()) {
          inst.source = ParseGenerationSource(src->get<std::string>());
        }
      }
      if (auto it = leaf.find("split"); it != leaf.end()) {
        if (!it->is_string()) throw ParseError(locus, "non-string split");
        inst.split = ParseSplit(it->get<std::string>());
        if (!inst.split) {
          issues.Report(locus, "split", "unknown split " + it->dump());
          continue;
        }
      }
      if (!seen_ids.insert(instance_id).second) {
        issues.Report(locus, "unique instance_id",
                      "instance_id already used by another record");
        continue;
      }
      result.records.push_back(std::move(inst));
    }
  }
  result.issues = issues.Take();
  return result;
}

LoadResult<JudgedInstance> LoadJudged(const std::filesystem::path& path,
                                      const LoadOptions& options) {
  return ParseJudged(ReadFileToString(path), options);
}

std::string SerializeJudged(std::span<const JudgedInstance> instances) {
  ordered_json doc = ordered_json::object();
  for (const auto& inst : instances) {
    ordered_json leaf = ordered_json::object();
    leaf["context"] = inst.passage;
    leaf["question"] = inst.question;
    leaf["reference"] = inst.reference;
    leaf["candidate"] = inst.candidate;
    if (inst.gold_score) leaf["score"] = *inst.gold_score;
    if (!inst.annotations.empty()) leaf["annotations"] = inst.annotations;
    leaf["metadata"] = {{"source", std::string(ToString(inst.source))}};
    if (inst.split) leaf["split"] = std::string(ToString(*inst.split));
    doc[inst.dataset_id][inst.instance_id] = std::move(leaf);
  }
  return doc.dump(2) + "\n";
}

void WriteJudged(const std::filesystem::path& path,
                 std::span<const JudgedInstance> instances) {
  WriteStringToFile(path, SerializeJudged(instances));
}

// ---------------------------------------------------------------------------
// Minimal pairs.

LoadResult<MinimalPair> ParseMinimalPairs(std::string_view text,
                                          const LoadOptions& options) {
  const ordered_json doc = ParseDocument(text);
  RequireObject(doc, "top level");
  LoadResult<MinimalPair> result;
  Issues issues(options.strict);
  for (const auto& [dataset_id, pairs] : doc.items()) {
    RequireObject(pairs, dataset_id);
    for (const auto& [pair_id, leaf] : pairs.items()) {
      const std::string locus = dataset_id + "/" + pair_id;
      RequireObject(leaf, locus);
      MinimalPair pair;
      pair.dataset_id = dataset_id;
      pair.pair_id = pair_id;
      pair.passage = RequireString(leaf, "context", locus);
      pair.question = RequireString(leaf, "question", locus);
      pair.reference = RequireString(leaf, "reference", locus);
      pair.candidate_1 = RequireString(leaf, "candidate1", locus);
      pair.candidate_2 = RequireString(leaf, "candidate2", locus);
      pair.score_1 = RequireNumber(leaf, "score1", locus);
      pair.score_2 = RequireNumber(leaf, "score2", locus);
      const std::string phenomenon = RequireString(leaf, "phenomenon", locus);
      auto parsed = ParsePhenomenon(phenomenon);
      if (!parsed) {
        issues.Report(locus, "phenomenon", "unknown phenomenon " + phenomenon);
        continue;
      }
      pair.phenomenon = *parsed;
      if (pair.score_1 < 1.0 || pair.score_1 > 5.0 || pair.score_2 < 1.0 ||
          pair.score_2 > 5.0) {
        issues.Report(locus, "score range", "pair scores must lie in [1, 5]");
        continue;
      }
      if (!(pair.score_1 > pair.score_2)) {
        issues.Report(locus, "score order",
                      "score1 must be strictly greater than score2");
        continue;
      }
      result.records.push_back(std::move(pair));
    }
  }
  result.issues = issues.Take();
  return result;
}

LoadResult<MinimalPair> LoadMinimalPairs(const std::filesystem::path& path,
                                         const LoadOptions& options) {
  return ParseMinimalPairs(ReadFileToString(path), options);
}

std::string SerializeMinimalPairs(std::span<const MinimalPair> pairs) {
  ordered_json doc = ordered_json::object();
  for (const auto& p : pairs) {
    ordered_json leaf = ordered_json::object();
    leaf["context"] = p.passage;
    leaf["question"] = p.question;
    leaf["reference"] = p.reference;
    leaf["candidate1"] = p.candidate_1;
    leaf["candidate2"] = p.candidate_2;
    leaf["score1"] = p.score_1;
    leaf["score2"] = p.score_2;
    leaf["phenomenon"] = std::string(ToString(p.phenomenon));
    doc[p.dataset_id][p.pair_id] = std::move(leaf);
  }
  return doc.dump(2) + "\n";
}

void WriteMinimalPairs(const std::filesystem::path& path,
                       std::span<const MinimalPair> pairs) {
  WriteStringToFile(path, SerializeMinimalPairs(pairs));
}

// ---------------------------------------------------------------------------
// Multiple-choice pre-training data.

LoadResult<MCExample> ParseMultipleChoice(std::string_view text,
                                          const LoadOptions& options) {
  const ordered_json doc = ParseDocument(text);
  if (!doc.is_array()) throw ParseError("top level", "expected a JSON array");
  LoadResult<MCExample> result;
  Issues issues(options.strict);
  for (size_t i = 0; i < doc.size(); ++i) {
    const std::string locus = "#" + std::to_string(i);
    const auto& leaf = RequireObject(doc[i], locus);
    MCExample mc;
    mc.passage = RequireString(leaf, "context", locus);
    mc.question = RequireString(leaf, "question", locus);
    auto opts = leaf.find("options");
    auto correct = leaf.find("correct");
    if (opts == leaf.end() || !opts->is_array()) {
      throw ParseError(locus, "missing or non-array field \"options\"");
    }
    if (correct == leaf.end() || !correct->is_array()) {
      throw ParseError(locus, "missing or non-array field \"correct\"");
    }
    for (const auto& o : *opts) {
      if (!o.is_string()) throw ParseError(locus, "non-string option");
      mc.options.push_back(o.get<std::string>());
    }
    bool valid = true;
    for (const auto& c : *correct) {
      if (!c.is_number_integer()) throw ParseError(locus, "non-integer index");
      const int idx = c.get<int>();
      if (idx < 0 || idx >= static_cast<int>(mc.options.size())) {
        issues.Report(locus, "correct index range",
                      "index " + std::to_string(idx) + " outside options");
        valid = false;
        break;
      }
      mc.correct_indices.insert(idx);
    }
    if (!valid) continue;
    if (mc.options.empty()) {
      issues.Report(locus, "nonempty options", "no answer options");
      continue;
    }
    if (mc.correct_indices.empty()) {
      issues.Report(locus, "nonempty correct", "no correct option");
      continue;
    }
    result.records.push_back(std::move(mc));
  }
  result.issues = issues.Take();
  return result;
}

LoadResult<MCExample> LoadMultipleChoice(const std::filesystem::path& path,
                                         const LoadOptions& options) {
  return ParseMultipleChoice(ReadFileToString(path), options);
}

std::string SerializeMultipleChoice(std::span<const MCExample> examples) {
  ordered_json doc = ordered_json::array();
  for (const auto& mc : examples) {
    ordered_json leaf = ordered_json::object();
    leaf["context"] = mc.passage;
    leaf["question"] = mc.question;
    leaf["options"] = mc.options;
    leaf["correct"] = std::vector<int>(mc.correct_indices.begin(),
                                       mc.correct_indices.end());
    doc.push_back(std::move(leaf));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

double AggregateGold(std::span<const int> annotations) {
  if (annotations.empty()) {
    throw PreconditionError("cannot aggregate an empty annotation list");
  }
  double sum = 0.0;
  for (int a : annotations) {
    if (a < 1 || a > 5) {
      throw PreconditionError("annotation " + std::to_string(a) +
                              " outside 1..5");
    }
    sum += a;
  }
  return sum / static_cast<double>(annotations.size());
}

bool IsNumericToken(std::string_view token) {
  static const std::regex kNumeric(
      R"(^[+-]?(\d{1,3}(,\d{3})+|\d+)(\.\d+)?$)");
  return std::regex_match(token.begin(), token.end(), kNumeric);
}

bool IsExactMatch(const JudgedInstance& instance) {
  return lexical::NormalizeTokenize(instance.reference) ==
         lexical::NormalizeTokenize(instance.candidate);
}

bool IsNumericPair(const JudgedInstance& instance) {
  const auto ref = lexical::NormalizeTokenize(instance.reference);
  const auto cand = lexical::NormalizeTokenize(instance.candidate);
  return ref.size() == 1 && cand.size() == 1 && IsNumericToken(ref[0]) &&
         IsNumericToken(cand[0]);
}

std::vector<JudgedInstance> FilterExactMatch(
    std::span<const JudgedInstance> instances) {
  std::vector<JudgedInstance> out;
  std::copy_if(instances.begin(), instances.end(), std::back_inserter(out),
               [](const JudgedInstance& i) { return !IsExactMatch(i); });
  return out;
}

std::vector<JudgedInstance> FilterNumericPairs(
    std::span<const JudgedInstance> instances) {
  std::vector<JudgedInstance> out;
  std::copy_if(instances.begin(), instances.end(), std::back_inserter(out),
               [](const JudgedInstance& i) { return !IsNumericPair(i); });
  return out;
}

std::string PassageKey(std::string_view passage) {
  return CollapseWhitespace(passage);
}

std::vector<Split> SplitByPassage(std::span<const JudgedInstance> instances,
                                  const SplitRatios& ratios, uint64_t seed) {
  if (ratios.train <= 0 || ratios.dev <= 0 || ratios.test <= 0 ||
      std::abs(ratios.train + ratios.dev + ratios.test - 1.0) > 1e-6) {
    throw PreconditionError("split ratios must be positive and sum to 1");
  }
  std::vector<Split> assignment(instances.size(), Split::kTrain);

  // dataset -> passages in first-appearance order -> member indices.
  std::vector<std::string> dataset_order;
  std::unordered_map<std::string, std::vector<std::vector<size_t>>> groups;
  std::unordered_map<std::string, std::unordered_map<std::string, size_t>>
      passage_index;
  for (size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    auto [ds_it, inserted] = groups.try_emplace(inst.dataset_id);
    if (inserted) dataset_order.push_back(inst.dataset_id);
    auto& index = passage_index[inst.dataset_id];
    const std::string key = PassageKey(inst.passage);
    auto [p_it, p_new] = index.try_emplace(key, ds_it->second.size());
    if (p_new) ds_it->second.emplace_back();
    ds_it->second[p_it->second].push_back(i);
  }

  const double fractions[3] = {ratios.train, ratios.dev, ratios.test};
  const Split splits[3] = {Split::kTrain, Split::kDev, Split::kTest};
  for (const auto& dataset : dataset_order) {
    auto& passages = groups[dataset];
    Rng rng(DeriveSeed(seed, "split/" + dataset));
    Shuffle(passages, rng);
    size_t total = 0;
    for (const auto& p : passages) total += p.size();
    double assigned[3] = {0, 0, 0};
    for (const auto& members : passages) {
      int best = 0;
      double best_deficit = -1e300;
      for (int k = 0; k < 3; ++k) {
        const double deficit = fractions[k] * total - assigned[k];
        if (deficit > best_deficit + 1e-12) {
          best_deficit = deficit;
          best = k;
        }
      }
      assigned[best] += static_cast<double>(members.size());
      for (size_t idx : members) assignment[idx] = splits[best];
    }
  }
  return assignment;
}

std::vector<PretrainExample> BuildPretrainExamples(const MCExample& mc,
                                                   std::mt19937_64& rng) {
  for (int idx : mc.correct_indices) {
    if (idx < 0 || idx >= static_cast<int>(mc.options.size())) {
      throw PreconditionError("correct index outside options");
    }
  }
  if (mc.correct_indices.empty()) {
    throw PreconditionError("multiple-choice example has no correct option");
  }
  std::vector<int> distractors;
  for (int i = 0; i < static_cast<int>(mc.options.size()); ++i) {
    if (!mc.correct_indices.contains(i)) distractors.push_back(i);
  }
  std::vector<PretrainExample> out;
  out.reserve(mc.correct_indices.size() * distractors.size() + 1);
  for (int c : mc.correct_indices) {
    for (int d : distractors) {
      PretrainExample ex{mc.passage, mc.question, "", "",
                         PretrainLabel::kFirstCorrect};
      if (CoinFlip(rng)) {
        ex.answer_1 = mc.options[d];
        ex.answer_2 = mc.options[c];
        ex.label = PretrainLabel::kSecondCorrect;
      } else {
        ex.answer_1 = mc.options[c];
        ex.answer_2 = mc.options[d];
      }
      out.push_back(std::move(ex));
    }
  }
  auto it = mc.correct_indices.begin();
  const int first = *it;
  const int second = mc.correct_indices.size() >= 2 ? *std::next(it) : first;
  out.push_back({mc.passage, mc.question, mc.options[first],
                 mc.options[second], PretrainLabel::kBothCorrect});
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct StatsAccumulator {
  std::unordered_set<std::string> passages;
  std::unordered_set<std::string> pairs;
  int candidates = 0;
  double passage_tokens = 0, question_tokens = 0, reference_tokens = 0,
         candidate_tokens = 0;

  void Add(const JudgedInstance& inst) {
    const std::string pkey = inst.dataset_id + '\x1f' + PassageKey(inst.passage);
    if (passages.insert(pkey).second) {
      passage_tokens += lexical::NormalizeTokenize(inst.passage).size();
    }
    if (pairs.insert(pkey + '\x1f' + inst.question + '\x1f' + inst.reference)
            .second) {
      question_tokens += lexical::NormalizeTokenize(inst.question).size();
      reference_tokens += lexical::NormalizeTokenize(inst.reference).size();
    }
    ++candidates;
    candidate_tokens += lexical::NormalizeTokenize(inst.candidate).size();
  }

  CorpusStatsCell Finish() const {
    CorpusStatsCell cell;
    cell.passages = static_cast<int>(passages.size());
    cell.question_reference_pairs = static_cast<int>(pairs.size());
    cell.candidates = candidates;
    if (cell.passages > 0) cell.mean_passage_tokens = passage_tokens / cell.passages;
    if (cell.question_reference_pairs > 0) {
      cell.mean_question_tokens = question_tokens / cell.question_reference_pairs;
      cell.mean_reference_tokens =
          reference_tokens / cell.question_reference_pairs;
    }
    if (candidates > 0) cell.mean_candidate_tokens = candidate_tokens / candidates;
    return cell;
  }
};

}  // namespace

CorpusStatistics ComputeCorpusStatistics(
    std::span<const JudgedInstance> instances) {
  std::map<std::pair<std::string, std::string>, StatsAccumulator> cells;
  std::map<std::string, StatsAccumulator> totals;
  for (const auto& inst : instances) {
    const std::string split =
        inst.split ? std::string(ToString(*inst.split)) : "unassigned";
    cells[{inst.dataset_id, split}].Add(inst);
    totals[split].Add(inst);
  }
  CorpusStatistics stats;
  for (const auto& [key, acc] : cells) stats.cells[key] = acc.Finish();
  for (const auto& [key, acc] : totals) stats.totals_by_split[key] = acc.Finish();
  return stats;
}

}  // namespace rceval
