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

#ifndef RCEVAL_LEARNED_H_
#define RCEVAL_LEARNED_H_

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rceval/corpus.h"
#include "rceval/encoder.h"
#include "rceval/heads.h"
#include "rceval/packing.h"

namespace rceval::learned {

struct ScorePrediction {
  double raw = 0.0;
  double reported = 0.0;  // raw clamped to [1, 5]
};

double ClampToScale(double raw);

// Encoder + regression head. Copyable (deep copy); const methods are safe
// for concurrent use.
class RegressionModel {
 public:
  RegressionModel(std::unique_ptr<Encoder> encoder, RegressionHead head,
                  FieldSet ablation = FieldSet::All());
  RegressionModel(const RegressionModel& other);
  RegressionModel& operator=(const RegressionModel& other);
  RegressionModel(RegressionModel&&) noexcept = default;
  RegressionModel& operator=(RegressionModel&&) noexcept = default;

  PackedInput Pack(std::string_view passage, std::string_view question,
                   std::string_view reference, std::string_view candidate,
                   FieldSet ablation) const;
  double PredictRaw(const PackedInput& input) const;

  // Uses the ablation the model was trained with.
  ScorePrediction Predict(std::string_view passage, std::string_view question,
                          std::string_view reference,
                          std::string_view candidate) const;
  ScorePrediction Predict(std::string_view passage, std::string_view question,
                          std::string_view reference,
                          std::string_view candidate, FieldSet ablation) const;

  // Forward + backward of (yhat - target)^2 scaled by `loss_scale`;
  // accumulates gradients and returns (yhat, unscaled loss).
  std::pair<double, double> AccumulateSquaredError(const PackedInput& input,
                                                   double target,
                                                   double loss_scale);

  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  RegressionHead& head() { return head_; }
  const RegressionHead& head() const { return head_; }
  FieldSet ablation() const { return ablation_; }
  void set_ablation(FieldSet ablation) { ablation_ = ablation; }

  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

 private:
  std::unique_ptr<Encoder> encoder_;
  RegressionHead head_;
  FieldSet ablation_;
};

// Encoder + 3-way head over [CLS] p [SEP] q [SEP] a1 [SEP] a2 [SEP].
class PairClassifier {
 public:
  PairClassifier(std::unique_ptr<Encoder> encoder, ClassificationHead head);
  PairClassifier(const PairClassifier& other);
  PairClassifier& operator=(const PairClassifier& other);
  PairClassifier(PairClassifier&&) noexcept = default;
  PairClassifier& operator=(PairClassifier&&) noexcept = default;

  PackedInput Pack(const PretrainExample& example) const;
  Eigen::VectorXd Logits(const PackedInput& input) const;
  PretrainLabel Predict(const PretrainExample& example) const;

  // Returns the cross-entropy; gradients are scaled by `loss_scale`.
  double AccumulateCrossEntropy(const PackedInput& input, PretrainLabel label,
                                double loss_scale);

  Encoder& encoder() { return *encoder_; }
  const Encoder& encoder() const { return *encoder_; }
  ClassificationHead& head() { return head_; }
  const ClassificationHead& head() const { return head_; }
  std::vector<Parameter*> Parameters();

 private:
  std::unique_ptr<Encoder> encoder_;
  ClassificationHead head_;
};

enum class SelectionMetric { kAccuracy, kPearson };
enum class DevPooling { kPooled, kPerDatasetMean };

std::string_view ToString(SelectionMetric metric);
std::string_view ToString(DevPooling pooling);

struct TrainConfig {
  int batch_size = 32;
  int epochs = 3;
  std::vector<double> learning_rates = {1e-5, 2e-5, 3e-5};
  int runs_per_learning_rate = 1;
  uint64_t seed = 0;
  FieldSet ablation = FieldSet::All();
  SelectionMetric selection_metric = SelectionMetric::kPearson;
  DevPooling dev_pooling = DevPooling::kPooled;
  double weight_decay = 0.01;
  double warmup_fraction = 0.1;
  double max_grad_norm = 1.0;

  // Reference recipes.
  static TrainConfig Pretraining();
  static TrainConfig Finetuning();

  // Throws PreconditionError describing the first invalid field.
  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> selection_value;  // absent when undefined
};

struct RunRecord {
  double learning_rate = 0.0;
  int run_index = 0;
  uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 1-based epoch whose parameters the run keeps
  std::optional<double> best_value;
};

struct TrainingHistory {
  std::string phase;  // "pretrain" or "finetune"
  SelectionMetric selection_metric = SelectionMetric::kPearson;
  std::vector<RunRecord> runs;
  int selected_run = 0;
  double selected_learning_rate = 0.0;
  std::vector<std::string> training_datasets;
  std::vector<std::string> selection_datasets;
  size_t training_examples = 0;
  size_t selection_examples = 0;
  std::vector<std::string> warnings;
};

struct FinetuneResult {
  RegressionModel model;
  TrainingHistory history;
};

struct PretrainResult {
  PairClassifier model;
  TrainingHistory history;
};

// Fine-tunes a copy of `initial` per grid point on squared error against the
// raw 1-5 gold scores and keeps the epoch/grid point with the best dev
// Pearson (on raw predictions). Throws PreconditionError naming the first
// training instance without a gold score.
FinetuneResult Finetune(const RegressionModel& initial,
                        std::span<const JudgedInstance> train,
                        const TrainConfig& config,
                        std::span<const JudgedInstance> dev);

// Three-way pre-training; selection by held-out accuracy. An empty held-out
// set falls back to the final epoch (recorded as a warning).
PretrainResult Pretrain(const PairClassifier& initial,
                        std::span<const PretrainExample> examples,
                        const TrainConfig& config,
                        std::span<const PretrainExample> heldout);

// Pearson between raw predictions and gold on `instances`, pooled or as the
// unweighted per-dataset mean. nullopt when undefined.
std::optional<double> DevPearson(const RegressionModel& model,
                                 std::span<const JudgedInstance> instances,
                                 DevPooling pooling);

double Accuracy(const PairClassifier& model,
                std::span<const PretrainExample> examples);

// Fresh regression model over `encoder`: head weights ~ N(0, 0.02), bias 3.0
// (0 and disabled when use_bias is false).
RegressionModel MakeRegressionModel(std::unique_ptr<Encoder> encoder,
                                    bool use_bias, uint64_t seed);
PairClassifier MakePairClassifier(std::unique_ptr<Encoder> encoder,
                                  uint64_t seed);

}  // namespace rceval::learned

#endif  // RCEVAL_LEARNED_H_
