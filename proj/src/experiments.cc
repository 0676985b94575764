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

#include "rceval/experiments.h"

#include <algorithm>
#include <memory>
#include <set>

#include "rceval/errors.h"

namespace rceval::metaeval {
namespace {

std::vector<std::string> DistinctDatasets(
    const std::vector<JudgedInstance>& instances) {
  std::set<std::string> ids;
  for (const auto& inst : instances) ids.insert(inst.dataset_id);
  return {ids.begin(), ids.end()};
}

learned::FinetuneResult Train(const TrainRecipe& recipe,
                              const std::vector<JudgedInstance>& train,
                              const std::vector<JudgedInstance>& dev,
                              TrainingManifest& manifest) {
  if (!recipe.initial_model) {
    throw PreconditionError("training recipe has no initial model factory");
  }
  if (train.empty()) throw PreconditionError("no training instances");
  manifest.training_datasets = DistinctDatasets(train);
  manifest.selection_datasets = DistinctDatasets(dev);
  manifest.training_instances = train.size();
  manifest.selection_instances = dev.size();
  return learned::Finetune(recipe.initial_model(), train, recipe.config, dev);
}

}  // namespace

nlohmann::ordered_json TrainingManifest::ToJson() const {
  nlohmann::ordered_json j;
  j["held_out"] = held_out ? nlohmann::ordered_json(*held_out)
                           : nlohmann::ordered_json(nullptr);
  j["training_datasets"] = training_datasets;
  j["selection_datasets"] = selection_datasets;
  j["training_instances"] = training_instances;
  j["selection_instances"] = selection_instances;
  return j;
}

OodResult RunOod(std::span<const JudgedInstance> corpus,
                 std::span<const MinimalPair> pairs, const TrainRecipe& recipe,
                 const std::string& held_out) {
  std::set<std::string> datasets;
  for (const auto& inst : corpus) datasets.insert(inst.dataset_id);
  if (!datasets.contains(held_out)) {
    throw PreconditionError("held-out dataset " + held_out +
                            " is not in the corpus");
  }
  if (datasets.size() < 2) {
    throw PreconditionError(
        "out-of-dataset training needs at least one other dataset");
  }
  std::vector<JudgedInstance> train, dev, eval;
  for (const auto& inst : corpus) {
    if (inst.dataset_id == held_out) {
      eval.push_back(inst);
    } else if (inst.split == Split::kTrain) {
      train.push_back(inst);
    } else if (inst.split == Split::kDev) {
      dev.push_back(inst);
    }
  }
  TrainingManifest manifest;
  manifest.held_out = held_out;
  auto trained = Train(recipe, train, dev, manifest);

  auto model = std::make_shared<const learned::RegressionModel>(trained.model);
  const MetricFn metric = LearnedMetric(model);
  CorrelationReport correlation =
      EvaluateCorrelation(metric, eval, {Split::kDev, Split::kTest});
  std::optional<PreferenceReport> preference;
  std::vector<MinimalPair> held_pairs;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(held_pairs),
               [&](const MinimalPair& p) { return p.dataset_id == held_out; });
  if (!held_pairs.empty()) preference = EvaluateMinimalPairs(metric, held_pairs);
  return {std::move(trained.model), std::move(trained.history),
          std::move(manifest), std::move(correlation), std::move(preference)};
}

AdResult RunAd(std::span<const JudgedInstance> corpus,
               const TrainRecipe& recipe) {
  if (corpus.empty()) throw PreconditionError("corpus is empty");
  std::vector<JudgedInstance> train, dev;
  for (const auto& inst : corpus) {
    if (inst.split == Split::kTrain) train.push_back(inst);
    if (inst.split == Split::kDev) dev.push_back(inst);
  }
  TrainingManifest manifest;
  auto trained = Train(recipe, train, dev, manifest);
  auto model = std::make_shared<const learned::RegressionModel>(trained.model);
  CorrelationReport correlation = EvaluateCorrelation(
      LearnedMetric(model), corpus, {Split::kDev, Split::kTest});
  return {std::move(trained.model), std::move(trained.history),
          std::move(manifest), std::move(correlation)};
}

}  // namespace rceval::metaeval
