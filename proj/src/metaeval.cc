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

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "rceval/errors.h"

namespace rceval::metaeval {

MetricFn LexicalMetric(lexical::Metric metric) {
  MetricFn fn;
  fn.name = std::string(lexical::MetricName(metric));
  fn.min_score = 0.0;
  fn.max_score = 1.0;
  fn.score = [metric](const ScoringInput& in) {
    return lexical::ScorePair(metric, in.reference, in.candidate);
  };
  return fn;
}

MetricFn LearnedMetric(std::shared_ptr<const learned::RegressionModel> model,
                       std::string name) {
  if (!model) throw PreconditionError("learned metric needs a model");
  MetricFn fn;
  fn.name = std::move(name);
  fn.min_score = 1.0;
  fn.max_score = 5.0;
  fn.score = [model](const ScoringInput& in) {
    return model->Predict(in.passage, in.question, in.reference, in.candidate)
        .raw;
  };
  return fn;
}

MetricFn LookupMetric(std::string name, const ScoreEntries& entries) {
  auto table = std::make_shared<std::unordered_map<std::string, double>>();
  double lo = 0.0, hi = 0.0;
  for (const auto& [id, score] : entries) {
    if (!table->emplace(id, score).second) {
      throw ParseError(id, "duplicate instance id in score entries");
    }
    if (table->size() == 1) {
      lo = hi = score;
    } else {
      lo = std::min(lo, score);
      hi = std::max(hi, score);
    }
  }
  MetricFn fn;
  fn.name = std::move(name);
  fn.min_score = lo;
  fn.max_score = hi;
  fn.score = [table](const ScoringInput& in) {
    auto it = table->find(std::string(in.instance_id));
    if (it == table->end()) {
      throw MissingScoreError("no score for instance " +
                              std::string(in.instance_id));
    }
    return it->second;
  };
  return fn;
}

MetricFn ImportExternalScores(const std::filesystem::path& path) {
  return LookupMetric("import:" + path.filename().string(),
                      ReadScoreFile(path));
}

std::string PairCandidateId(std::string_view pair_id, int which) {
  return std::string(pair_id) + "#" + std::to_string(which);
}

ScoringInput ToScoringInput(const JudgedInstance& inst) {
  return {inst.instance_id, inst.passage, inst.question, inst.reference,
          inst.candidate};
}

const CorrelationCell* CorrelationReport::Find(std::string_view dataset,
                                               std::string_view split) const {
  for (const auto& cell : cells) {
    if (cell.dataset_id == dataset && cell.split == split) return &cell;
  }
  return nullptr;
}

namespace {

struct Series {
  std::vector<double> metric;
  std::vector<double> gold;
};

void FillCorrelation(const Series& series, size_t& n, std::optional<double>& r,
                     std::string& reason) {
  n = series.metric.size();
  if (n < 2) {
    reason = "fewer than 2 instances";
    return;
  }
  try {
    r = Pearson(series.metric, series.gold);
  } catch (const UndefinedCorrelationError&) {
    reason = "zero variance";
  }
}

bool SplitSelected(const JudgedInstance& inst, const std::set<Split>& splits) {
  if (splits.empty()) return true;
  return inst.split && splits.contains(*inst.split);
}

double RequireGold(const JudgedInstance& inst) {
  if (!inst.gold_score) {
    throw PreconditionError("instance " + inst.instance_id +
                            " has no gold score");
  }
  return *inst.gold_score;
}

}  // namespace

CorrelationReport EvaluateCorrelation(const MetricFn& metric,
                                      std::span<const JudgedInstance> instances,
                                      const std::set<Split>& splits) {
  CorrelationReport report;
  report.metric = metric.name;
  if (splits.empty()) {
    report.splits = {"all"};
  } else {
    for (Split s : splits) report.splits.emplace_back(ToString(s));
  }
  std::map<std::pair<std::string, std::string>, Series> series;
  for (const auto& inst : instances) {
    if (!SplitSelected(inst, splits)) continue;
    const double gold = RequireGold(inst);
    if (std::find(report.datasets.begin(), report.datasets.end(),
                  inst.dataset_id) == report.datasets.end()) {
      report.datasets.push_back(inst.dataset_id);
    }
    const std::string split =
        splits.empty() ? "all" : std::string(ToString(*inst.split));
    auto& s = series[{inst.dataset_id, split}];
    s.metric.push_back(metric(ToScoringInput(inst)));
    s.gold.push_back(gold);
  }
  for (const auto& dataset : report.datasets) {
    for (const auto& split : report.splits) {
      CorrelationCell cell;
      cell.dataset_id = dataset;
      cell.split = split;
      auto it = series.find({dataset, split});
      if (it == series.end()) {
        cell.undefined_reason = "no instances";
      } else {
        FillCorrelation(it->second, cell.n, cell.r, cell.undefined_reason);
      }
      report.cells.push_back(std::move(cell));
    }
  }
  for (const auto& split : report.splits) {
    double sum = 0.0;
    int defined = 0;
    for (const auto& cell : report.cells) {
      if (cell.split == split && cell.r) {
        sum += *cell.r;
        ++defined;
      }
    }
    report.average[split] =
        defined > 0 ? std::optional<double>(sum / defined) : std::nullopt;
  }
  return report;
}

SourceCorrelationReport PerSourceCorrelation(
    const MetricFn& metric, std::span<const JudgedInstance> instances,
    const std::set<Split>& splits) {
  SourceCorrelationReport report;
  report.metric = metric.name;
  std::vector<std::pair<std::string, GenerationSource>> order;
  std::map<std::pair<std::string, GenerationSource>, Series> series;
  for (const auto& inst : instances) {
    if (!SplitSelected(inst, splits)) continue;
    const double gold = RequireGold(inst);
    const auto key = std::make_pair(inst.dataset_id, inst.source);
    auto [it, inserted] = series.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.metric.push_back(metric(ToScoringInput(inst)));
    it->second.gold.push_back(gold);
  }
  for (const auto& key : order) {
    SourceCorrelationCell cell;
    cell.dataset_id = key.first;
    cell.source = key.second;
    FillCorrelation(series[key], cell.n, cell.r, cell.undefined_reason);
    report.cells.push_back(std::move(cell));
  }
  return report;
}

PreferenceReport EvaluateMinimalPairs(const MetricFn& metric,
                                      std::span<const MinimalPair> pairs,
                                      double tie_epsilon) {
  if (pairs.empty()) throw PreconditionError("no minimal pairs to evaluate");
  PreferenceReport report;
  report.metric = metric.name;
  auto cell_for = [](std::vector<PreferenceCell>& cells,
                     const std::string& key) -> PreferenceCell& {
    for (auto& c : cells) {
      if (c.key == key) return c;
    }
    cells.push_back({key});
    return cells.back();
  };
  for (const auto& pair : pairs) {
    const std::string id1 = PairCandidateId(pair.pair_id, 1);
    const std::string id2 = PairCandidateId(pair.pair_id, 2);
    const double s1 = metric({id1, pair.passage, pair.question, pair.reference,
                              pair.candidate_1});
    const double s2 = metric({id2, pair.passage, pair.question, pair.reference,
                              pair.candidate_2});
    for (PreferenceCell* cell :
         {&cell_for(report.datasets, pair.dataset_id),
          &cell_for(report.phenomena, std::string(ToString(pair.phenomenon)))}) {
      if (std::abs(s1 - s2) <= tie_epsilon) {
        ++cell->ties;
      } else if (s1 > s2) {
        ++cell->wins;
      } else {
        ++cell->losses;
      }
    }
  }
  for (auto* cells : {&report.datasets, &report.phenomena}) {
    for (auto& c : *cells) {
      c.accuracy = (c.wins + 0.5 * c.ties) / static_cast<double>(c.pairs());
    }
  }
  double sum = 0.0;
  for (const auto& c : report.datasets) sum += c.accuracy;
  report.average = sum / static_cast<double>(report.datasets.size());
  return report;
}

std::vector<DivergenceEntry> TopDivergences(const ScoreEntries& scores_a,
                                            const ScoreEntries& scores_b,
                                            size_t k) {
  std::unordered_map<std::string, double> b;
  for (const auto& [id, score] : scores_b) b.emplace(id, score);
  if (b.size() != scores_a.size()) {
    throw PreconditionError("score maps cover different instance sets");
  }
  std::vector<DivergenceEntry> entries;
  entries.reserve(scores_a.size());
  for (const auto& [id, score] : scores_a) {
    auto it = b.find(id);
    if (it == b.end()) {
      throw PreconditionError("instance " + id + " missing from second map");
    }
    entries.push_back({id, score, it->second, std::abs(score - it->second), 0});
  }
  std::sort(entries.begin(), entries.end(),
            [](const DivergenceEntry& x, const DivergenceEntry& y) {
              if (x.delta != y.delta) return x.delta > y.delta;
              return x.instance_id < y.instance_id;
            });
  if (entries.size() > k) entries.resize(k);
  int rank = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    if (i == 0 || entries[i].delta != entries[i - 1].delta) ++rank;
    entries[i].rank = rank;
  }
  return entries;
}

}  // namespace rceval::metaeval
