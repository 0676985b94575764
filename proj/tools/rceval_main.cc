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

// rceval command-line tool.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli_config.h"
#include "json.hpp"
#include "rceval/checkpoint.h"
#include "rceval/corpus.h"
#include "rceval/encoder.h"
#include "rceval/errors.h"
#include "rceval/experiments.h"
#include "rceval/hashing.h"
#include "rceval/learned.h"
#include "rceval/lexical.h"
#include "rceval/metaeval.h"
#include "rceval/random.h"
#include "rceval/reports.h"
#include "rceval/score_file.h"
#include "rceval/service.h"

namespace rceval::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr char kVersion[] = "0.1.0";
constexpr char kValidMetrics[] =
    "bleu1, rouge_l, meteor, learned:<checkpoint>, import:<file>";

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct Globals {
  std::string config;
  uint64_t seed = 0;
  bool strict = false;
  std::string out_dir = ".";
};

// Shared state for one invocation.
struct Context {
  Globals globals;
  const CLI::App* app = nullptr;
  std::string command;
  std::vector<std::string> args;

  fs::path Out(const std::string& name) const {
    return fs::path(globals.out_dir) / name;
  }
};

ordered_json BuildManifest(const Context& ctx,
                           const std::vector<fs::path>& inputs) {
  ordered_json m;
  m["tool"] = "rceval";
  m["version"] = kVersion;
  m["command"] = ctx.command;
  m["seed"] = ctx.globals.seed;
  m["strict"] = ctx.globals.strict;
  m["args"] = ctx.args;
  if (!ctx.globals.config.empty()) {
    m["config_file"] = ctx.globals.config;
    m["config_file_contents"] =
        ordered_json::parse(ReadFileToString(ctx.globals.config));
  } else {
    m["config_file"] = nullptr;
  }
  m["options"] = ResolvedOptions(*ctx.app);
  ordered_json fingerprints = ordered_json::object();
  for (const auto& p : inputs) {
    if (fs::is_regular_file(p)) {
      fingerprints[p.string()] = Sha256Hex(ReadFileToString(p));
    } else if (fs::exists(p / learned::kParamsFile)) {
      fingerprints[p.string()] = learned::ModelFingerprint(p);
    }
  }
  m["inputs"] = std::move(fingerprints);
  return m;
}

void WriteManifest(const Context& ctx, const ordered_json& manifest) {
  fs::create_directories(ctx.globals.out_dir);
  WriteStringToFile(ctx.Out("manifest.json"), manifest.dump(2) + "\n");
}

void WriteReport(const Context& ctx, const std::string& stem,
                 const ordered_json& report, const ordered_json& manifest,
                 const std::string& text) {
  fs::create_directories(ctx.globals.out_dir);
  WriteStringToFile(ctx.Out(stem + ".json"),
                    reports::EmbedManifest(report, manifest).dump(2) + "\n");
  WriteStringToFile(ctx.Out(stem + ".txt"),
                    text + "manifest_sha256 " +
                        reports::ManifestHash(manifest) + "\n");
  std::cout << text;
}

LoadOptions Loading(const Context& ctx, bool allow_unscored = false) {
  LoadOptions o;
  o.strict = ctx.globals.strict;
  o.allow_unscored = allow_unscored;
  return o;
}

std::vector<JudgedInstance> LoadCorpus(const Context& ctx,
                                       const fs::path& path,
                                       bool allow_unscored = false) {
  auto result = LoadJudged(path, Loading(ctx, allow_unscored));
  for (const auto& issue : result.issues) {
    std::cerr << "warning: skipped " << issue.record_id << " ("
              << issue.invariant << "): " << issue.message << "\n";
  }
  return std::move(result.records);
}

std::vector<MinimalPair> LoadPairs(const Context& ctx, const fs::path& path) {
  auto result = LoadMinimalPairs(path, Loading(ctx));
  for (const auto& issue : result.issues) {
    std::cerr << "warning: skipped " << issue.record_id << " ("
              << issue.invariant << "): " << issue.message << "\n";
  }
  return std::move(result.records);
}

// ---------------------------------------------------------------------------
// Metric selection.

struct ResolvedMetric {
  metaeval::MetricFn fn;
  std::optional<ScoreEntries> entries;  // set for score-file metrics
  std::vector<fs::path> inputs;
};

ResolvedMetric ResolveMetric(const std::string& name) {
  ResolvedMetric r;
  if (auto m = lexical::ParseMetric(name)) {
    r.fn = metaeval::LexicalMetric(*m);
    return r;
  }
  const std::string learned_prefix = "learned";
  if (name.rfind(learned_prefix, 0) == 0) {
    const std::string rest = name.substr(learned_prefix.size());
    if (rest.size() < 2 || rest[0] != ':') {
      throw UsageError(
          "learned metric needs a checkpoint: learned:<checkpoint_dir>");
    }
    const fs::path dir = rest.substr(1);
    auto model = std::make_shared<const learned::RegressionModel>(
        learned::LoadRegressionCheckpoint(dir));
    r.fn = metaeval::LearnedMetric(std::move(model), name);
    r.inputs.push_back(dir);
    return r;
  }
  const std::string import_prefix = "import:";
  if (name.rfind(import_prefix, 0) == 0 && name.size() > import_prefix.size()) {
    const fs::path file = name.substr(import_prefix.size());
    r.entries = ReadScoreFile(file);
    r.fn = metaeval::LookupMetric(name, *r.entries);
    r.inputs.push_back(file);
    return r;
  }
  throw UsageError("unknown metric '" + name + "'; valid metrics: " +
                   kValidMetrics);
}

std::vector<ResolvedMetric> ResolveMetrics(
    const std::vector<std::string>& names,
    const std::vector<std::string>& score_files) {
  std::vector<ResolvedMetric> out;
  for (const auto& n : names) out.push_back(ResolveMetric(n));
  for (const auto& f : score_files) {
    ResolvedMetric r;
    r.entries = ReadScoreFile(f);
    r.fn = metaeval::LookupMetric(fs::path(f).stem().string(), *r.entries);
    r.inputs.push_back(f);
    out.push_back(std::move(r));
  }
  if (out.empty()) {
    throw UsageError("give at least one --metric or --scores");
  }
  return out;
}

// Throws ValidationError naming up to 10 mismatches: ids in `wanted` without
// a score, and scored ids outside `known` (defaults to `wanted`).
void CheckIds(const std::string& label, const std::vector<std::string>& wanted,
              const ScoreEntries& entries,
              const std::vector<std::string>* known = nullptr) {
  std::set<std::string> have;
  for (const auto& [id, v] : entries) have.insert(id);
  if (known == nullptr) known = &wanted;
  std::set<std::string> want(known->begin(), known->end());
  std::vector<std::string> mismatches;
  for (const auto& id : wanted) {
    if (have.count(id) == 0) mismatches.push_back(id + " (missing from scores)");
  }
  for (const auto& id : have) {
    if (want.count(id) == 0) mismatches.push_back(id + " (not in corpus)");
  }
  if (mismatches.empty()) return;
  std::ostringstream msg;
  msg << mismatches.size()
      << " mismatched instance ids between score file and corpus";
  if (mismatches.size() > 10) msg << " (first 10 shown)";
  msg << ":";
  for (size_t i = 0; i < mismatches.size() && i < 10; ++i) {
    msg << "\n  " << mismatches[i];
  }
  throw ValidationError(label, "matching instance ids", msg.str());
}

std::set<Split> ParseSplits(const std::vector<std::string>& names) {
  std::set<Split> splits;
  for (const auto& n : names) {
    if (n == "all") return {};
    auto s = ParseSplit(n);
    if (!s) throw UsageError("unknown split '" + n + "'");
    splits.insert(*s);
  }
  return splits;
}

std::vector<std::string> EvaluatedIds(std::span<const JudgedInstance> corpus,
                                      const std::set<Split>& splits) {
  std::vector<std::string> ids;
  for (const auto& inst : corpus) {
    if (!splits.empty() && (!inst.split || splits.count(*inst.split) == 0)) {
      continue;
    }
    ids.push_back(inst.instance_id);
  }
  return ids;
}

// ---------------------------------------------------------------------------
// ingest

struct IngestArgs {
  std::vector<std::string> inputs;
  std::string kind = "judged";
  bool filter_exact = false;
  bool filter_numeric = false;
  bool assign_splits = false;
  std::vector<double> split_ratios = {0.8, 0.1, 0.1};
  bool allow_unscored = false;
  std::string output = "corpus.json";
};

void AddDrop(ordered_json& dropped, const std::string& record,
             const std::string& reason, const std::string& message) {
  dropped.push_back({{"record", record}, {"reason", reason}, {"message", message}});
}

int RunIngest(const Context& ctx, const IngestArgs& a) {
  std::vector<fs::path> inputs(a.inputs.begin(), a.inputs.end());
  const ordered_json manifest = BuildManifest(ctx, inputs);
  const LoadOptions options = Loading(ctx, a.allow_unscored);
  ordered_json dropped = ordered_json::array();
  ordered_json report;
  size_t read = 0;
  size_t written = 0;
  std::string canonical;

  if (a.kind == "judged") {
    std::vector<JudgedInstance> all;
    std::set<std::string> seen;
    for (const auto& path : inputs) {
      auto result = LoadJudged(path, options);
      read += result.records.size() + result.issues.size();
      for (const auto& issue : result.issues) {
        AddDrop(dropped, issue.record_id, issue.invariant, issue.message);
      }
      for (auto& inst : result.records) {
        if (!seen.insert(inst.instance_id).second) {
          const std::string rec = inst.dataset_id + "/" + inst.instance_id;
          if (ctx.globals.strict) {
            throw ValidationError(rec, "unique instance_id",
                                  "instance id repeated across inputs");
          }
          AddDrop(dropped, rec, "unique instance_id",
                  "instance id repeated across inputs");
          continue;
        }
        all.push_back(std::move(inst));
      }
    }
    std::vector<JudgedInstance> kept;
    for (auto& inst : all) {
      const std::string rec = inst.dataset_id + "/" + inst.instance_id;
      if (a.filter_exact && IsExactMatch(inst)) {
        AddDrop(dropped, rec, "exact match",
                "candidate equals reference after normalization");
        continue;
      }
      if (a.filter_numeric && IsNumericPair(inst)) {
        AddDrop(dropped, rec, "numeric pair",
                "reference and candidate are both numeric");
        continue;
      }
      kept.push_back(std::move(inst));
    }
    size_t assigned = 0;
    if (a.assign_splits) {
      if (a.split_ratios.size() != 3) {
        throw UsageError("--split-ratios takes three values: train dev test");
      }
      std::vector<size_t> unsplit;
      std::vector<JudgedInstance> subset;
      for (size_t i = 0; i < kept.size(); ++i) {
        if (!kept[i].split) {
          unsplit.push_back(i);
          subset.push_back(kept[i]);
        }
      }
      const SplitRatios ratios{a.split_ratios[0], a.split_ratios[1],
                               a.split_ratios[2]};
      const auto splits = SplitByPassage(
          subset, ratios, DeriveSeed(ctx.globals.seed, "ingest/split"));
      for (size_t k = 0; k < unsplit.size(); ++k) {
        kept[unsplit[k]].split = splits[k];
      }
      assigned = unsplit.size();
    }
    written = kept.size();
    report["splits_assigned"] = assigned;
    canonical = SerializeJudged(kept);
  } else if (a.kind == "pairs") {
    std::vector<MinimalPair> all;
    for (const auto& path : inputs) {
      auto result = LoadMinimalPairs(path, options);
      read += result.records.size() + result.issues.size();
      for (const auto& issue : result.issues) {
        AddDrop(dropped, issue.record_id, issue.invariant, issue.message);
      }
      for (auto& p : result.records) all.push_back(std::move(p));
    }
    written = all.size();
    canonical = SerializeMinimalPairs(all);
  } else if (a.kind == "mc") {
    std::vector<MCExample> all;
    for (const auto& path : inputs) {
      auto result = LoadMultipleChoice(path, options);
      read += result.records.size() + result.issues.size();
      for (const auto& issue : result.issues) {
        AddDrop(dropped, issue.record_id, issue.invariant, issue.message);
      }
      for (auto& e : result.records) all.push_back(std::move(e));
    }
    written = all.size();
    canonical = SerializeMultipleChoice(all);
  } else {
    throw UsageError("unknown --kind '" + a.kind + "' (judged, pairs, mc)");
  }

  fs::create_directories(ctx.globals.out_dir);
  WriteStringToFile(ctx.Out(a.output), canonical);
  report["kind"] = a.kind;
  report["records_read"] = read;
  report["records_written"] = written;
  report["dropped"] = dropped;
  WriteManifest(ctx, manifest);
  WriteStringToFile(ctx.Out("ingest_report.json"),
                    reports::EmbedManifest(report, manifest).dump(2) + "\n");
  std::cout << "read " << read << ", wrote " << written << ", dropped "
            << dropped.size() << "\n";
  for (const auto& d : dropped) {
    std::cout << "  dropped " << d["record"].get<std::string>() << ": "
              << d["reason"].get<std::string>() << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// stats

struct StatsArgs {
  std::string corpus;
  double bin_width = 0.5;
};

int RunStats(const Context& ctx, const StatsArgs& a) {
  if (!(a.bin_width > 0.0)) throw UsageError("--bin-width must be positive");
  const ordered_json manifest = BuildManifest(ctx, {a.corpus});
  const auto corpus = LoadCorpus(ctx, a.corpus);
  const CorpusStatistics stats = ComputeCorpusStatistics(corpus);
  ordered_json report = reports::ToJson(stats);

  std::map<std::string, AnnotationTable> tables;
  std::vector<std::string> order;
  for (const auto& inst : corpus) {
    if (tables.count(inst.dataset_id) == 0) order.push_back(inst.dataset_id);
    auto& table = tables[inst.dataset_id];
    for (size_t i = 0; i < inst.annotations.size(); ++i) {
      table.Add(inst.instance_id, "annotator_" + std::to_string(i),
                inst.annotations[i]);
    }
  }
  ordered_json agreement = ordered_json::object();
  for (const auto& ds : order) {
    try {
      agreement[ds] = KrippendorffAlpha(tables[ds]);
    } catch (const PreconditionError&) {
      agreement[ds] = nullptr;
    }
  }
  report["krippendorff_alpha"] = agreement;

  // Gold-score histogram as CSV counts.
  const int bins = static_cast<int>(std::ceil(4.0 / a.bin_width - 1e-9));
  std::map<std::pair<std::string, std::string>, std::vector<int>> counts;
  for (const auto& inst : corpus) {
    if (!inst.gold_score) continue;
    const std::string split =
        inst.split ? std::string(ToString(*inst.split)) : "unassigned";
    auto& row = counts[{inst.dataset_id, split}];
    row.resize(bins, 0);
    int b = static_cast<int>((*inst.gold_score - 1.0) / a.bin_width);
    row[std::clamp(b, 0, bins - 1)]++;
  }
  std::ostringstream csv;
  csv << "dataset,split,bin_low,bin_high,count\n";
  for (const auto& [key, row] : counts) {
    for (int b = 0; b < bins; ++b) {
      char line[256];
      std::snprintf(line, sizeof(line), "%s,%s,%.3f,%.3f,%d\n",
                    key.first.c_str(), key.second.c_str(),
                    1.0 + b * a.bin_width,
                    std::min(5.0, 1.0 + (b + 1) * a.bin_width), row[b]);
      csv << line;
    }
  }
  WriteManifest(ctx, manifest);
  WriteStringToFile(ctx.Out("score_histogram.csv"), csv.str());
  WriteReport(ctx, "stats", report, manifest,
              reports::FormatStatisticsTable(stats));
  return kOk;
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string metric;
  std::string corpus;
  std::string pairs;
  std::string output = "scores.json";
  bool clamp = false;
};

int RunScore(const Context& ctx, const ScoreArgs& a) {
  if (a.corpus.empty() == a.pairs.empty()) {
    throw UsageError("give exactly one of --corpus or --pairs");
  }
  ResolvedMetric metric = ResolveMetric(a.metric);
  std::vector<fs::path> inputs = metric.inputs;
  inputs.push_back(a.corpus.empty() ? a.pairs : a.corpus);
  const ordered_json manifest = BuildManifest(ctx, inputs);
  const bool learned = a.metric.rfind("learned:", 0) == 0;
  auto finish = [&](double v) {
    return learned && a.clamp ? learned::ClampToScale(v) : v;
  };

  ScoreEntries entries;
  if (!a.corpus.empty()) {
    const auto corpus = LoadCorpus(ctx, a.corpus, /*allow_unscored=*/true);
    if (metric.entries) {
      std::vector<std::string> ids;
      for (const auto& inst : corpus) ids.push_back(inst.instance_id);
      CheckIds(a.metric, ids, *metric.entries);
    }
    if (auto lex = lexical::ParseMetric(a.metric)) {
      entries = lexical::ScoreBatch(*lex, corpus);
    } else {
      for (const auto& inst : corpus) {
        entries.emplace_back(inst.instance_id,
                             finish(metric.fn(metaeval::ToScoringInput(inst))));
      }
    }
  } else {
    const auto pairs = LoadPairs(ctx, a.pairs);
    for (const auto& p : pairs) {
      for (int which : {1, 2}) {
        const std::string id = metaeval::PairCandidateId(p.pair_id, which);
        metaeval::ScoringInput in{id, p.passage, p.question, p.reference,
                                  which == 1 ? p.candidate_1 : p.candidate_2};
        entries.emplace_back(id, finish(metric.fn(in)));
      }
    }
  }
  fs::create_directories(ctx.globals.out_dir);
  WriteScoreFile(ctx.Out(a.output), entries);
  WriteManifest(ctx, manifest);
  std::cout << "wrote " << entries.size() << " scores to "
            << ctx.Out(a.output).string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// Training manifests.

struct TrainOverrides {
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::vector<double> learning_rates;
  std::optional<int> runs;
  std::vector<std::string> ablation;
  std::string dev_pooling;
  bool no_bias = false;
};

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path = p;
  return path.is_relative() ? base / path : path;
}

std::vector<std::string> PathList(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& e : v) out.push_back(e.get<std::string>());
  } else {
    throw UsageError(std::string("manifest field '") + key +
                     "' must be a path or a list of paths");
  }
  return out;
}

struct TrainingPlan {
  fs::path manifest_path;
  json manifest;
  learned::TrainConfig config;
  std::vector<fs::path> inputs;

  fs::path Path(const std::string& p) const {
    return Resolve(manifest_path.parent_path(), p);
  }
};

TrainingPlan LoadTrainingPlan(const Context& ctx, const std::string& path,
                              learned::TrainConfig defaults,
                              const TrainOverrides& o) {
  TrainingPlan plan;
  plan.manifest_path = path;
  try {
    plan.manifest = json::parse(ReadFileToString(path));
  } catch (const json::parse_error& e) {
    throw UsageError("training manifest " + path + ": " + e.what());
  }
  if (!plan.manifest.is_object()) {
    throw UsageError("training manifest must be a JSON object");
  }
  plan.inputs.push_back(path);
  try {
    plan.config = learned::TrainConfigFromJson(
        plan.manifest.value("train_config", json::object()), defaults);
  } catch (const json::exception& e) {
    throw UsageError(std::string("train_config: ") + e.what());
  }
  if (o.epochs) plan.config.epochs = *o.epochs;
  if (o.batch_size) plan.config.batch_size = *o.batch_size;
  if (!o.learning_rates.empty()) plan.config.learning_rates = o.learning_rates;
  if (o.runs) plan.config.runs_per_learning_rate = *o.runs;
  if (!o.ablation.empty()) {
    plan.config.ablation = learned::FieldSet::FromNames(o.ablation);
  }
  if (o.dev_pooling == "pooled") {
    plan.config.dev_pooling = learned::DevPooling::kPooled;
  } else if (o.dev_pooling == "per_dataset_mean") {
    plan.config.dev_pooling = learned::DevPooling::kPerDatasetMean;
  } else if (!o.dev_pooling.empty()) {
    throw UsageError("unknown --dev-pooling '" + o.dev_pooling +
                     "' (pooled, per_dataset_mean)");
  }
  if (o.no_bias) plan.manifest["use_bias"] = false;
  plan.config.seed = ctx.globals.seed;
  try {
    plan.config.Validate();
  } catch (const PreconditionError& e) {
    throw UsageError(std::string("train_config: ") + e.what());
  }
  return plan;
}

learned::TransformerConfig EncoderConfig(const json& manifest) {
  const json spec = manifest.value("encoder", json::object());
  const std::string preset = spec.value("preset", "tiny");
  learned::TransformerConfig c;
  if (preset == "tiny") {
    c = learned::TransformerConfig::Tiny();
  } else if (preset != "base") {
    throw UsageError("unknown encoder preset '" + preset + "' (tiny, base)");
  }
  json merged = {{"vocab_buckets", c.vocab_buckets},
                 {"hidden_size", c.hidden_size},
                 {"num_layers", c.num_layers},
                 {"num_heads", c.num_heads},
                 {"ffn_size", c.ffn_size},
                 {"max_length", c.max_length},
                 {"init_stddev", c.init_stddev},
                 {"layer_norm_eps", c.layer_norm_eps}};
  for (const auto& [k, v] : spec.items()) {
    if (k != "preset") merged[k] = v;
  }
  return learned::TransformerEncoder::ParseConfig(merged.dump());
}

std::unique_ptr<learned::Encoder> InitialEncoder(const Context& ctx,
                                                 TrainingPlan& plan) {
  if (plan.manifest.contains("init_checkpoint")) {
    const fs::path dir =
        plan.Path(plan.manifest.at("init_checkpoint").get<std::string>());
    plan.inputs.push_back(dir);
    const json prov =
        json::parse(ReadFileToString(dir / learned::kProvenanceFile));
    if (prov.value("model", "") == "classifier") {
      return learned::LoadClassifierCheckpoint(dir).encoder().Clone();
    }
    return learned::LoadRegressionCheckpoint(dir).encoder().Clone();
  }
  return std::make_unique<learned::TransformerEncoder>(
      EncoderConfig(plan.manifest),
      DeriveSeed(ctx.globals.seed, "encoder/init"));
}

metaeval::TrainRecipe FinetuneRecipe(const Context& ctx, TrainingPlan& plan) {
  auto encoder = std::shared_ptr<const learned::Encoder>(InitialEncoder(ctx, plan));
  const bool use_bias = plan.manifest.value("use_bias", true);
  const uint64_t head_seed = DeriveSeed(ctx.globals.seed, "head/init");
  metaeval::TrainRecipe recipe;
  recipe.config = plan.config;
  recipe.initial_model = [encoder, use_bias, head_seed, ablation = plan.config.ablation] {
    auto model = learned::MakeRegressionModel(encoder->Clone(), use_bias, head_seed);
    model.set_ablation(ablation);
    return model;
  };
  return recipe;
}

class IncompleteMarker {
 public:
  IncompleteMarker(const fs::path& dir, const ordered_json& manifest)
      : path_(dir / learned::kIncompleteMarker) {
    WriteStringToFile(path_, manifest.dump(2) + "\n");
  }

 private:
  fs::path path_;
};

void PrepareCheckpointDir(const fs::path& dir, bool force) {
  if (fs::exists(dir / learned::kParamsFile) &&
      !fs::exists(dir / learned::kIncompleteMarker) && !force) {
    throw UsageError("checkpoint directory " + dir.string() +
                     " already holds a checkpoint (use --force)");
  }
  fs::create_directories(dir);
}

void WriteHistories(const fs::path& dir, const learned::TrainingHistory& h) {
  fs::create_directories(dir);
  const ordered_json all = learned::ToJson(h);
  for (size_t i = 0; i < h.runs.size(); ++i) {
    char name[128];
    std::snprintf(name, sizeof(name), "%s_lr%.3g_run%d.json", h.phase.c_str(),
                  h.runs[i].learning_rate, h.runs[i].run_index);
    ordered_json run = all["runs"][i];
    run["phase"] = h.phase;
    run["selected"] = static_cast<int>(i) == h.selected_run;
    WriteStringToFile(dir / name, run.dump(2) + "\n");
  }
  WriteStringToFile(dir / (h.phase + "_summary.json"), all.dump(2) + "\n");
}

ordered_json Fingerprints(const std::vector<fs::path>& inputs) {
  ordered_json j = ordered_json::object();
  for (const auto& p : inputs) {
    if (fs::is_regular_file(p)) j[p.string()] = Sha256Hex(ReadFileToString(p));
  }
  return j;
}

std::vector<JudgedInstance> SelectDatasets(std::vector<JudgedInstance> corpus,
                                           const json& manifest) {
  if (!manifest.contains("datasets")) return corpus;
  const auto wanted = manifest.at("datasets").get<std::set<std::string>>();
  std::vector<JudgedInstance> out;
  for (auto& inst : corpus) {
    if (wanted.count(inst.dataset_id) != 0) out.push_back(std::move(inst));
  }
  return out;
}

struct TrainArgs {
  std::string manifest;
  std::string checkpoint_dir;
  bool force = false;
  TrainOverrides overrides;
};

int RunFinetune(const Context& ctx, const TrainArgs& a) {
  TrainingPlan plan = LoadTrainingPlan(
      ctx, a.manifest, learned::TrainConfig::Finetuning(), a.overrides);
  const auto corpus_paths = PathList(plan.manifest, "corpus");
  if (corpus_paths.empty()) {
    throw UsageError("finetune manifest needs 'corpus'");
  }
  std::vector<JudgedInstance> corpus;
  for (const auto& p : corpus_paths) {
    const fs::path path = plan.Path(p);
    plan.inputs.push_back(path);
    for (auto& inst : LoadCorpus(ctx, path)) corpus.push_back(std::move(inst));
  }
  corpus = SelectDatasets(std::move(corpus), plan.manifest);
  std::vector<JudgedInstance> train;
  std::vector<JudgedInstance> dev;
  for (const auto& inst : corpus) {
    if (inst.split == Split::kTrain) train.push_back(inst);
    if (inst.split == Split::kDev) dev.push_back(inst);
  }
  if (train.empty()) throw ValidationError("corpus", "split", "no train split");

  metaeval::TrainRecipe recipe = FinetuneRecipe(ctx, plan);
  const ordered_json manifest = BuildManifest(ctx, plan.inputs);
  const fs::path dir = a.checkpoint_dir.empty() ? ctx.Out("checkpoint")
                                                : fs::path(a.checkpoint_dir);
  PrepareCheckpointDir(dir, a.force);
  learned::DirectoryLock lock(dir);
  IncompleteMarker marker(dir, manifest);
  WriteManifest(ctx, manifest);

  auto result = learned::Finetune(recipe.initial_model(), train, plan.config, dev);
  WriteHistories(ctx.Out("history"), result.history);
  learned::CheckpointMetadata meta;
  meta.phase = "finetune";
  meta.config = plan.config;
  meta.data_fingerprints = Fingerprints(plan.inputs);
  meta.manifest = manifest;
  meta.history = result.history;
  learned::SaveCheckpoint(result.model, meta, dir);
  for (const auto& w : result.history.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "selected lr " << result.history.selected_learning_rate
            << " (run " << result.history.selected_run << "); checkpoint "
            << dir.string() << "\n";
  return kOk;
}

std::vector<PretrainExample> PretrainSet(const Context& ctx,
                                         const TrainingPlan& plan,
                                         std::vector<fs::path>& inputs,
                                         const char* key,
                                         const std::string& label) {
  Rng rng(DeriveSeed(ctx.globals.seed, label));
  std::vector<PretrainExample> out;
  for (const auto& p : PathList(plan.manifest, key)) {
    const fs::path path = plan.Path(p);
    inputs.push_back(path);
    auto result = LoadMultipleChoice(path, Loading(ctx));
    for (const auto& issue : result.issues) {
      std::cerr << "warning: skipped " << issue.record_id << " ("
                << issue.invariant << "): " << issue.message << "\n";
    }
    for (const auto& mc : result.records) {
      for (auto& ex : BuildPretrainExamples(mc, rng)) out.push_back(std::move(ex));
    }
  }
  Shuffle(out, rng);
  return out;
}

int RunPretrain(const Context& ctx, const TrainArgs& a) {
  TrainingPlan plan = LoadTrainingPlan(
      ctx, a.manifest, learned::TrainConfig::Pretraining(), a.overrides);
  auto examples = PretrainSet(ctx, plan, plan.inputs, "multiple_choice",
                              "pretrain/examples");
  if (examples.empty()) {
    throw ValidationError("multiple_choice", "nonempty options",
                          "no pre-training examples");
  }
  auto heldout =
      PretrainSet(ctx, plan, plan.inputs, "heldout", "pretrain/heldout");
  auto encoder = InitialEncoder(ctx, plan);
  const auto initial = learned::MakePairClassifier(
      std::move(encoder), DeriveSeed(ctx.globals.seed, "classifier/init"));
  const ordered_json manifest = BuildManifest(ctx, plan.inputs);
  const fs::path dir = a.checkpoint_dir.empty() ? ctx.Out("checkpoint")
                                                : fs::path(a.checkpoint_dir);
  PrepareCheckpointDir(dir, a.force);
  learned::DirectoryLock lock(dir);
  IncompleteMarker marker(dir, manifest);
  WriteManifest(ctx, manifest);

  auto result = learned::Pretrain(initial, examples, plan.config, heldout);
  WriteHistories(ctx.Out("history"), result.history);
  learned::CheckpointMetadata meta;
  meta.phase = "pretrain";
  meta.config = plan.config;
  meta.data_fingerprints = Fingerprints(plan.inputs);
  meta.manifest = manifest;
  meta.history = result.history;
  learned::SaveCheckpoint(result.model, meta, dir);
  for (const auto& w : result.history.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "selected lr " << result.history.selected_learning_rate
            << " (run " << result.history.selected_run << "); checkpoint "
            << dir.string() << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string corpus;
  std::string pairs;
  std::vector<std::string> metrics;
  std::vector<std::string> scores;
  std::vector<std::string> splits = {"dev", "test"};
  double tie_epsilon = 0.0;
  std::string manifest;
  std::vector<std::string> held_out;
  std::string scores_a;
  std::string scores_b;
  size_t k = 10;
  TrainOverrides overrides;
};

std::vector<fs::path> MetricInputs(const std::vector<ResolvedMetric>& metrics) {
  std::vector<fs::path> out;
  for (const auto& m : metrics) {
    out.insert(out.end(), m.inputs.begin(), m.inputs.end());
  }
  return out;
}

int RunEvalCorr(const Context& ctx, const EvalArgs& a, bool per_source) {
  if (a.corpus.empty()) throw UsageError("--corpus is required");
  auto metrics = ResolveMetrics(a.metrics, a.scores);
  auto inputs = MetricInputs(metrics);
  inputs.push_back(a.corpus);
  const ordered_json manifest = BuildManifest(ctx, inputs);
  const auto corpus = LoadCorpus(ctx, a.corpus);
  const auto splits = ParseSplits(a.splits);
  const auto ids = EvaluatedIds(corpus, splits);
  const auto all_ids = EvaluatedIds(corpus, {});
  for (const auto& m : metrics) {
    if (m.entries) CheckIds(m.fn.name, ids, *m.entries, &all_ids);
  }
  // Score-file metrics only cover the evaluated ids.
  std::vector<JudgedInstance> evaluated;
  for (const auto& inst : corpus) {
    if (splits.empty() || (inst.split && splits.count(*inst.split) != 0)) {
      evaluated.push_back(inst);
    }
  }
  WriteManifest(ctx, manifest);
  ordered_json list = ordered_json::array();
  if (per_source) {
    std::string text;
    for (const auto& m : metrics) {
      auto r = metaeval::PerSourceCorrelation(m.fn, evaluated, splits);
      list.push_back(reports::ToJson(r));
      text += "metric " + r.metric + "\n" + reports::FormatSourceTable(r);
    }
    WriteReport(ctx, "per_source", {{"reports", list}}, manifest, text);
    return kOk;
  }
  std::vector<metaeval::CorrelationReport> all;
  for (const auto& m : metrics) {
    all.push_back(metaeval::EvaluateCorrelation(m.fn, evaluated, splits));
    list.push_back(reports::ToJson(all.back()));
  }
  WriteReport(ctx, "corr", {{"reports", list}}, manifest,
              reports::FormatCorrelationTable(all));
  return kOk;
}

int RunEvalPairs(const Context& ctx, const EvalArgs& a) {
  if (a.pairs.empty()) throw UsageError("--pairs is required");
  auto metrics = ResolveMetrics(a.metrics, a.scores);
  auto inputs = MetricInputs(metrics);
  inputs.push_back(a.pairs);
  const ordered_json manifest = BuildManifest(ctx, inputs);
  const auto pairs = LoadPairs(ctx, a.pairs);
  std::vector<std::string> ids;
  for (const auto& p : pairs) {
    ids.push_back(metaeval::PairCandidateId(p.pair_id, 1));
    ids.push_back(metaeval::PairCandidateId(p.pair_id, 2));
  }
  for (const auto& m : metrics) {
    if (m.entries) CheckIds(m.fn.name, ids, *m.entries);
  }
  WriteManifest(ctx, manifest);
  std::vector<metaeval::PreferenceReport> all;
  ordered_json list = ordered_json::array();
  for (const auto& m : metrics) {
    all.push_back(metaeval::EvaluateMinimalPairs(m.fn, pairs, a.tie_epsilon));
    list.push_back(reports::ToJson(all.back()));
  }
  WriteReport(ctx, "pairs", {{"reports", list}}, manifest,
              reports::FormatPreferenceTable(all));
  return kOk;
}

metaeval::CorrelationReport MergeHeldOut(
    const std::string& name, const std::vector<metaeval::CorrelationReport>& rs) {
  metaeval::CorrelationReport merged;
  merged.metric = name;
  for (const auto& r : rs) {
    if (merged.splits.empty()) merged.splits = r.splits;
    for (const auto& ds : r.datasets) merged.datasets.push_back(ds);
    for (const auto& c : r.cells) merged.cells.push_back(c);
  }
  for (const auto& s : merged.splits) {
    double sum = 0.0;
    int n = 0;
    for (const auto& c : merged.cells) {
      if (c.split == s && c.r) {
        sum += *c.r;
        ++n;
      }
    }
    merged.average[s] = n > 0 ? std::optional<double>(sum / n) : std::nullopt;
  }
  return merged;
}

int RunEvalOod(const Context& ctx, const EvalArgs& a) {
  if (a.corpus.empty() || a.manifest.empty()) {
    throw UsageError("ood needs --corpus and --manifest");
  }
  TrainingPlan plan = LoadTrainingPlan(
      ctx, a.manifest, learned::TrainConfig::Finetuning(), a.overrides);
  plan.inputs.push_back(a.corpus);
  if (!a.pairs.empty()) plan.inputs.push_back(a.pairs);
  const auto corpus = LoadCorpus(ctx, a.corpus);
  const auto pairs = a.pairs.empty() ? std::vector<MinimalPair>{}
                                     : LoadPairs(ctx, a.pairs);
  auto recipe = FinetuneRecipe(ctx, plan);
  const ordered_json manifest = BuildManifest(ctx, plan.inputs);
  WriteManifest(ctx, manifest);

  std::vector<std::string> held_out = a.held_out;
  if (held_out.empty()) {
    for (const auto& inst : corpus) {
      if (std::find(held_out.begin(), held_out.end(), inst.dataset_id) ==
          held_out.end()) {
        held_out.push_back(inst.dataset_id);
      }
    }
  }
  ordered_json runs = ordered_json::array();
  std::vector<metaeval::CorrelationReport> reports_by_ds;
  std::vector<metaeval::PreferenceReport> prefs;
  for (const auto& ds : held_out) {
    auto result = metaeval::RunOod(corpus, pairs, recipe, ds);
    const fs::path dir = ctx.Out("ood") / ds;
    WriteHistories(dir / "history", result.history);
    learned::CheckpointMetadata meta;
    meta.phase = "finetune";
    meta.config = plan.config;
    meta.data_fingerprints = Fingerprints(plan.inputs);
    meta.manifest = manifest;
    meta.manifest["training_manifest"] = result.manifest.ToJson();
    meta.history = result.history;
    learned::SaveCheckpoint(result.model, meta, dir / "checkpoint");
    ordered_json run;
    run["held_out"] = ds;
    run["training_manifest"] = result.manifest.ToJson();
    run["correlation"] = reports::ToJson(result.correlation);
    if (result.preference) run["preference"] = reports::ToJson(*result.preference);
    runs.push_back(std::move(run));
    reports_by_ds.push_back(result.correlation);
    if (result.preference) prefs.push_back(*result.preference);
  }
  std::vector<metaeval::CorrelationReport> table = {
      MergeHeldOut("learned (ood)", reports_by_ds)};
  std::string text = reports::FormatCorrelationTable(table);
  ordered_json report = {{"runs", runs},
                         {"summary", reports::ToJson(table.front())}};
  WriteReport(ctx, "ood", report, manifest, text);
  return kOk;
}

int RunEvalAd(const Context& ctx, const EvalArgs& a) {
  if (a.corpus.empty() || a.manifest.empty()) {
    throw UsageError("ad needs --corpus and --manifest");
  }
  TrainingPlan plan = LoadTrainingPlan(
      ctx, a.manifest, learned::TrainConfig::Finetuning(), a.overrides);
  plan.inputs.push_back(a.corpus);
  const auto corpus = LoadCorpus(ctx, a.corpus);
  auto recipe = FinetuneRecipe(ctx, plan);
  const ordered_json manifest = BuildManifest(ctx, plan.inputs);
  WriteManifest(ctx, manifest);
  auto result = metaeval::RunAd(corpus, recipe);
  const fs::path dir = ctx.Out("ad");
  WriteHistories(dir / "history", result.history);
  learned::CheckpointMetadata meta;
  meta.phase = "finetune";
  meta.config = plan.config;
  meta.data_fingerprints = Fingerprints(plan.inputs);
  meta.manifest = manifest;
  meta.manifest["training_manifest"] = result.manifest.ToJson();
  meta.history = result.history;
  learned::SaveCheckpoint(result.model, meta, dir / "checkpoint");
  result.correlation.metric = "learned (ad)";
  std::vector<metaeval::CorrelationReport> table = {result.correlation};
  ordered_json report = {{"training_manifest", result.manifest.ToJson()},
                         {"correlation", reports::ToJson(result.correlation)}};
  WriteReport(ctx, "ad", report, manifest, reports::FormatCorrelationTable(table));
  return kOk;
}

int RunEvalDiverge(const Context& ctx, const EvalArgs& a) {
  if (a.scores_a.empty() || a.scores_b.empty()) {
    throw UsageError("diverge needs --scores-a and --scores-b");
  }
  const ordered_json manifest = BuildManifest(ctx, {a.scores_a, a.scores_b});
  const auto sa = ReadScoreFile(a.scores_a);
  const auto sb = ReadScoreFile(a.scores_b);
  std::vector<std::string> ids;
  for (const auto& [id, v] : sa) ids.push_back(id);
  CheckIds(a.scores_b, ids, sb);
  WriteManifest(ctx, manifest);
  const auto top = metaeval::TopDivergences(sa, sb, a.k);
  WriteReport(ctx, "diverge", {{"entries", reports::ToJson(top)}}, manifest,
              reports::FormatDivergenceTable(top));
  return kOk;
}

// ---------------------------------------------------------------------------
// serve

struct ServeArgs {
  std::string models;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int RunServe(const Context&, const ServeArgs& a) {
  service::MetricRegistry registry;
  if (a.models.empty()) {
    registry.AddLexicalMetrics();
  } else {
    registry = service::LoadModelsManifest(a.models);
  }
  service::ScoringService svc(std::move(registry), &std::cerr);
  service::HttpServer server(svc);

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  const int port = server.Start(a.host, a.port);
  std::cerr << "listening on " << a.host << ":" << port << "\n";
  int received = 0;
  sigwait(&signals, &received);
  server.Stop();
  return kOk;
}

// ---------------------------------------------------------------------------

void AddTrainOverrides(CLI::App* cmd, TrainOverrides& o) {
  cmd->add_option("--epochs", o.epochs, "Override train_config.epochs");
  cmd->add_option("--batch-size", o.batch_size,
                  "Override train_config.batch_size");
  cmd->add_option("--lr", o.learning_rates,
                  "Override the learning-rate grid");
  cmd->add_option("--runs", o.runs,
                  "Override train_config.runs_per_learning_rate");
  cmd->add_option("--ablation", o.ablation,
                  "Input fields: passage question reference candidate");
  cmd->add_option("--dev-pooling", o.dev_pooling,
                  "pooled or per_dataset_mean");
  cmd->add_flag("--no-bias", o.no_bias, "Regression head without bias");
}

std::string CommandPath(const CLI::App& app) {
  std::string path;
  const CLI::App* cur = &app;
  while (true) {
    auto subs = cur->get_subcommands();
    if (subs.empty()) break;
    cur = subs.front();
    if (!path.empty()) path += " ";
    path += cur->get_name();
  }
  return path;
}

int Main(int argc, char** argv) {
  CLI::App app{"rceval: evaluation metrics for reading-comprehension answers"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  Context ctx;
  app.set_config("--config", "", "JSON config file (flags override it)");
  app.add_option("--seed", ctx.globals.seed, "Seed for all randomness")
      ->capture_default_str();
  app.add_flag("--strict", ctx.globals.strict,
               "Abort on the first invalid record");
  app.add_option("--out-dir", ctx.globals.out_dir, "Output directory")
      ->capture_default_str();

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate and canonicalize corpus files");
  ingest_cmd->add_option("--input", ingest.inputs, "Input files")->required();
  ingest_cmd->add_option("--kind", ingest.kind, "judged, pairs or mc")
      ->capture_default_str();
  ingest_cmd->add_flag("--filter-exact", ingest.filter_exact,
                       "Drop candidates identical to the reference");
  ingest_cmd->add_flag("--filter-numeric", ingest.filter_numeric,
                       "Drop numeric reference/candidate pairs");
  ingest_cmd->add_flag("--assign-splits", ingest.assign_splits,
                       "Assign splits by passage to records without one");
  ingest_cmd->add_option("--split-ratios", ingest.split_ratios,
                         "train dev test ratios")
      ->expected(3);
  ingest_cmd->add_flag("--allow-unscored", ingest.allow_unscored,
                       "Accept records without judgments");
  ingest_cmd->add_option("--output", ingest.output, "Output file name")
      ->capture_default_str();

  StatsArgs stats;
  auto* stats_cmd = app.add_subcommand("stats", "Corpus statistics");
  stats_cmd->add_option("--corpus", stats.corpus, "Judged corpus")->required();
  stats_cmd->add_option("--bin-width", stats.bin_width, "Histogram bin width")
      ->capture_default_str();

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score a corpus with a metric");
  score_cmd->add_option("--metric", score.metric, kValidMetrics)->required();
  score_cmd->add_option("--corpus", score.corpus, "Judged corpus");
  score_cmd->add_option("--pairs", score.pairs, "Minimal-pair file");
  score_cmd->add_option("--output", score.output, "Score file name")
      ->capture_default_str();
  score_cmd->add_flag("--clamp", score.clamp,
                      "Write learned scores clamped to 1..5");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a learned metric");
  train_cmd->require_subcommand(1);
  auto* pretrain_cmd = train_cmd->add_subcommand("pretrain", "Pre-train on multiple-choice data");
  auto* finetune_cmd = train_cmd->add_subcommand("finetune", "Fine-tune on judged data");
  for (auto* cmd : {pretrain_cmd, finetune_cmd}) {
    cmd->add_option("--manifest", train.manifest, "Training manifest")->required();
    cmd->add_option("--checkpoint-dir", train.checkpoint_dir,
                    "Checkpoint directory (default <out-dir>/checkpoint)");
    cmd->add_flag("--force", train.force, "Overwrite an existing checkpoint");
    AddTrainOverrides(cmd, train.overrides);
  }

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Meta-evaluation reports");
  eval_cmd->require_subcommand(1);
  auto add_metric_opts = [&](CLI::App* cmd) {
    cmd->add_option("--metric", eval.metrics, kValidMetrics);
    cmd->add_option("--scores", eval.scores, "Score files");
  };
  auto* corr_cmd = eval_cmd->add_subcommand("corr", "Correlation with judgments");
  auto* source_cmd = eval_cmd->add_subcommand("per-source", "Correlation by generation source");
  for (auto* cmd : {corr_cmd, source_cmd}) {
    cmd->add_option("--corpus", eval.corpus, "Judged corpus")->required();
    cmd->add_option("--splits", eval.splits, "Splits (or all)")
        ->capture_default_str();
    add_metric_opts(cmd);
  }
  auto* pairs_cmd = eval_cmd->add_subcommand("pairs", "Minimal-pair preference accuracy");
  pairs_cmd->add_option("--pairs", eval.pairs, "Minimal-pair file")->required();
  pairs_cmd->add_option("--tie-epsilon", eval.tie_epsilon, "Tie threshold")
      ->capture_default_str();
  add_metric_opts(pairs_cmd);
  auto* ood_cmd = eval_cmd->add_subcommand("ood", "Out-of-dataset training and evaluation");
  auto* ad_cmd = eval_cmd->add_subcommand("ad", "All-datasets training and evaluation");
  for (auto* cmd : {ood_cmd, ad_cmd}) {
    cmd->add_option("--corpus", eval.corpus, "Judged corpus")->required();
    cmd->add_option("--manifest", eval.manifest, "Training manifest")->required();
    AddTrainOverrides(cmd, eval.overrides);
  }
  ood_cmd->add_option("--pairs", eval.pairs, "Minimal-pair file");
  ood_cmd->add_option("--held-out", eval.held_out,
                      "Held-out datasets (default: each in turn)");
  auto* diverge_cmd = eval_cmd->add_subcommand("diverge", "Largest score disagreements");
  diverge_cmd->add_option("--scores-a", eval.scores_a, "First score file")->required();
  diverge_cmd->add_option("--scores-b", eval.scores_b, "Second score file")->required();
  diverge_cmd->add_option("-k,--k", eval.k, "Rows")->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP scoring service");
  serve_cmd->add_option("--models", serve.models, "Models manifest");
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  ctx.app = &app;
  ctx.command = CommandPath(app);
  for (int i = 1; i < argc; ++i) ctx.args.emplace_back(argv[i]);
  if (app.get_config_ptr()->count() > 0) {
    ctx.globals.config = app.get_config_ptr()->as<std::string>();
  }

  try {
    if (*ingest_cmd) return RunIngest(ctx, ingest);
    if (*stats_cmd) return RunStats(ctx, stats);
    if (*score_cmd) return RunScore(ctx, score);
    if (*pretrain_cmd) return RunPretrain(ctx, train);
    if (*finetune_cmd) return RunFinetune(ctx, train);
    if (*corr_cmd) return RunEvalCorr(ctx, eval, false);
    if (*source_cmd) return RunEvalCorr(ctx, eval, true);
    if (*pairs_cmd) return RunEvalPairs(ctx, eval);
    if (*ood_cmd) return RunEvalOod(ctx, eval);
    if (*ad_cmd) return RunEvalAd(ctx, eval);
    if (*diverge_cmd) return RunEvalDiverge(ctx, eval);
    if (*serve_cmd) return RunServe(ctx, serve);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.locus() << ": " << e.what() << "\n";
    return kValidation;
  } catch (const MissingScoreError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const PreconditionError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace
}  // namespace rceval::cli

int main(int argc, char** argv) { return rceval::cli::Main(argc, argv); }
