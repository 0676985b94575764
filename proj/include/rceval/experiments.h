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

#ifndef RCEVAL_EXPERIMENTS_H_
#define RCEVAL_EXPERIMENTS_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rceval/corpus.h"
#include "rceval/learned.h"
#include "rceval/metaeval.h"

namespace rceval::metaeval {

// How to obtain and train a model: `initial_model` builds the starting point
// (typically a pre-trained encoder with a fresh regression head).
struct TrainRecipe {
  learned::TrainConfig config = learned::TrainConfig::Finetuning();
  std::function<learned::RegressionModel()> initial_model;
};

// Which data a run trained and selected on. Built from the instances that
// actually reached the trainer.
struct TrainingManifest {
  std::optional<std::string> held_out;
  std::vector<std::string> training_datasets;
  std::vector<std::string> selection_datasets;
  size_t training_instances = 0;
  size_t selection_instances = 0;

  nlohmann::ordered_json ToJson() const;
};

struct OodResult {
  learned::RegressionModel model;
  learned::TrainingHistory history;
  TrainingManifest manifest;
  CorrelationReport correlation;  // held-out dataset, dev and test
  std::optional<PreferenceReport> preference;  // held-out minimal pairs
};

struct AdResult {
  learned::RegressionModel model;
  learned::TrainingHistory history;
  TrainingManifest manifest;
  CorrelationReport correlation;  // every dataset, dev and test
};

// Out-of-dataset: train on the train splits of every dataset except
// `held_out`, select on their dev splits, and evaluate on `held_out` only.
OodResult RunOod(std::span<const JudgedInstance> corpus,
                 std::span<const MinimalPair> pairs, const TrainRecipe& recipe,
                 const std::string& held_out);

// All datasets: train on every train split, select on the pooled dev
// splits, evaluate per dataset.
AdResult RunAd(std::span<const JudgedInstance> corpus,
               const TrainRecipe& recipe);

}  // namespace rceval::metaeval

#endif  // RCEVAL_EXPERIMENTS_H_
