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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "rceval/errors.h"
#include "rceval/hashing.h"
#include "rceval/learned.h"
#include "rceval/optimizer.h"
#include "rceval/random.h"
#include "rceval/stats.h"

namespace rceval::learned {

double ClampToScale(double raw) { return std::clamp(raw, 1.0, 5.0); }

// ---------------------------------------------------------------------------
// RegressionModel

RegressionModel::RegressionModel(std::unique_ptr<Encoder> encoder,
                                 RegressionHead head, FieldSet ablation)
    : encoder_(std::move(encoder)), head_(std::move(head)), ablation_(ablation) {
  if (!encoder_) throw PreconditionError("regression model needs an encoder");
  if (head_.hidden_size() != encoder_->hidden_size()) {
    throw PreconditionError("head width does not match encoder hidden size");
  }
}

RegressionModel::RegressionModel(const RegressionModel& other)
    : encoder_(other.encoder_->Clone()),
      head_(other.head_),
      ablation_(other.ablation_) {}

RegressionModel& RegressionModel::operator=(const RegressionModel& other) {
  if (this != &other) {
    encoder_ = other.encoder_->Clone();
    head_ = other.head_;
    ablation_ = other.ablation_;
  }
  return *this;
}

PackedInput RegressionModel::Pack(std::string_view passage,
                                  std::string_view question,
                                  std::string_view reference,
                                  std::string_view candidate,
                                  FieldSet ablation) const {
  return PackInput(passage, question, reference, candidate, ablation,
                   encoder_->tokenizer(), encoder_->max_length());
}

double RegressionModel::PredictRaw(const PackedInput& input) const {
  const auto act = encoder_->Forward(input);
  return head_.Forward(act->hidden.row(0).transpose());
}

ScorePrediction RegressionModel::Predict(std::string_view passage,
                                         std::string_view question,
                                         std::string_view reference,
                                         std::string_view candidate) const {
  return Predict(passage, question, reference, candidate, ablation_);
}

ScorePrediction RegressionModel::Predict(std::string_view passage,
                                         std::string_view question,
                                         std::string_view reference,
                                         std::string_view candidate,
                                         FieldSet ablation) const {
  const double raw =
      PredictRaw(Pack(passage, question, reference, candidate, ablation));
  return {raw, ClampToScale(raw)};
}

std::pair<double, double> RegressionModel::AccumulateSquaredError(
    const PackedInput& input, double target, double loss_scale) {
  const auto act = encoder_->Forward(input);
  const Eigen::VectorXd pooled = act->hidden.row(0).transpose();
  const double prediction = head_.Forward(pooled);
  const double error = prediction - target;
  const Eigen::VectorXd d_pooled =
      head_.Backward(pooled, 2.0 * error * loss_scale);
  Eigen::MatrixXd d_hidden =
      Eigen::MatrixXd::Zero(act->hidden.rows(), act->hidden.cols());
  d_hidden.row(0) = d_pooled.transpose();
  encoder_->Backward(*act, d_hidden);
  return {prediction, error * error};
}

std::vector<Parameter*> RegressionModel::Parameters() {
  auto params = encoder_->Parameters();
  for (Parameter* p : head_.Parameters()) params.push_back(p);
  return params;
}

std::vector<const Parameter*> RegressionModel::Parameters() const {
  auto params = std::as_const(*encoder_).Parameters();
  for (const Parameter* p : head_.Parameters()) params.push_back(p);
  return params;
}

// ---------------------------------------------------------------------------
// PairClassifier

PairClassifier::PairClassifier(std::unique_ptr<Encoder> encoder,
                               ClassificationHead head)
    : encoder_(std::move(encoder)), head_(std::move(head)) {
  if (!encoder_) throw PreconditionError("classifier needs an encoder");
}

PairClassifier::PairClassifier(const PairClassifier& other)
    : encoder_(other.encoder_->Clone()), head_(other.head_) {}

PairClassifier& PairClassifier::operator=(const PairClassifier& other) {
  if (this != &other) {
    encoder_ = other.encoder_->Clone();
    head_ = other.head_;
  }
  return *this;
}

PackedInput PairClassifier::Pack(const PretrainExample& example) const {
  return PackInput(example.passage, example.question, example.answer_1,
                   example.answer_2, FieldSet::All(), encoder_->tokenizer(),
                   encoder_->max_length());
}

Eigen::VectorXd PairClassifier::Logits(const PackedInput& input) const {
  const auto act = encoder_->Forward(input);
  return head_.Forward(act->hidden.row(0).transpose());
}

PretrainLabel PairClassifier::Predict(const PretrainExample& example) const {
  const Eigen::VectorXd logits = Logits(Pack(example));
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return static_cast<PretrainLabel>(best);
}

double PairClassifier::AccumulateCrossEntropy(const PackedInput& input,
                                              PretrainLabel label,
                                              double loss_scale) {
  const auto act = encoder_->Forward(input);
  const Eigen::VectorXd pooled = act->hidden.row(0).transpose();
  Eigen::VectorXd d_logits;
  const double loss = CrossEntropy(head_.Forward(pooled), label, &d_logits);
  const Eigen::VectorXd d_pooled = head_.Backward(pooled, loss_scale * d_logits);
  Eigen::MatrixXd d_hidden =
      Eigen::MatrixXd::Zero(act->hidden.rows(), act->hidden.cols());
  d_hidden.row(0) = d_pooled.transpose();
  encoder_->Backward(*act, d_hidden);
  return loss;
}

std::vector<Parameter*> PairClassifier::Parameters() {
  auto params = encoder_->Parameters();
  for (Parameter* p : head_.Parameters()) params.push_back(p);
  return params;
}

// ---------------------------------------------------------------------------

std::string_view ToString(SelectionMetric metric) {
  return metric == SelectionMetric::kAccuracy ? "accuracy" : "pearson";
}

std::string_view ToString(DevPooling pooling) {
  return pooling == DevPooling::kPooled ? "pooled" : "per_dataset_mean";
}

TrainConfig TrainConfig::Pretraining() {
  TrainConfig c;
  c.epochs = 4;
  c.selection_metric = SelectionMetric::kAccuracy;
  return c;
}

TrainConfig TrainConfig::Finetuning() {
  TrainConfig c;
  c.epochs = 3;
  c.selection_metric = SelectionMetric::kPearson;
  return c;
}

void TrainConfig::Validate() const {
  if (batch_size <= 0) throw PreconditionError("batch_size must be positive");
  if (epochs <= 0) throw PreconditionError("epochs must be positive");
  if (learning_rates.empty()) {
    throw PreconditionError("learning-rate grid is empty");
  }
  for (double lr : learning_rates) {
    if (!(lr > 0.0)) throw PreconditionError("learning rates must be positive");
  }
  if (runs_per_learning_rate <= 0) {
    throw PreconditionError("runs_per_learning_rate must be positive");
  }
  if (ablation.empty()) throw PreconditionError("ablation set is empty");
  if (warmup_fraction < 0.0 || warmup_fraction >= 1.0) {
    throw PreconditionError("warmup_fraction must be in [0, 1)");
  }
}

RegressionModel MakeRegressionModel(std::unique_ptr<Encoder> encoder,
                                    bool use_bias, uint64_t seed) {
  const int d = encoder->hidden_size();
  return RegressionModel(std::move(encoder),
                         RegressionHead(d, use_bias, 3.0, 0.02, seed));
}

PairClassifier MakePairClassifier(std::unique_ptr<Encoder> encoder,
                                  uint64_t seed) {
  const int d = encoder->hidden_size();
  return PairClassifier(std::move(encoder), ClassificationHead(d, 0.02, seed));
}

std::optional<double> DevPearson(const RegressionModel& model,
                                 std::span<const JudgedInstance> instances,
                                 DevPooling pooling) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>>
      by_dataset;
  std::vector<double> preds, golds;
  for (const auto& inst : instances) {
    if (!inst.gold_score) continue;
    const double raw = model.PredictRaw(model.Pack(
        inst.passage, inst.question, inst.reference, inst.candidate,
        model.ablation()));
    preds.push_back(raw);
    golds.push_back(*inst.gold_score);
    by_dataset[inst.dataset_id].first.push_back(raw);
    by_dataset[inst.dataset_id].second.push_back(*inst.gold_score);
  }
  try {
    if (pooling == DevPooling::kPooled) return Pearson(preds, golds);
    double sum = 0.0;
    int defined = 0;
    for (const auto& [id, xy] : by_dataset) {
      try {
        sum += Pearson(xy.first, xy.second);
        ++defined;
      } catch (const Error&) {
      }
    }
    if (defined == 0) return std::nullopt;
    return sum / defined;
  } catch (const Error&) {
    return std::nullopt;
  }
}

double Accuracy(const PairClassifier& model,
                std::span<const PretrainExample> examples) {
  if (examples.empty()) return 0.0;
  size_t correct = 0;
  for (const auto& ex : examples) {
    if (model.Predict(ex) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(examples.size());
}

namespace {

std::string FormatLearningRate(double lr) {
  std::ostringstream ss;
  ss << std::setprecision(6) << lr;
  return ss.str();
}

// Shared grid/epoch loop. `accumulate(model, index, scale)` runs forward and
// backward for one training example and returns its loss; `evaluate(model)`
// returns the selection value (nullopt when undefined).
template <typename Model, typename Accumulate, typename Evaluate>
std::pair<Model, TrainingHistory> RunGrid(const Model& initial,
                                          size_t num_examples,
                                          const TrainConfig& config,
                                          const std::string& phase,
                                          Accumulate accumulate,
                                          Evaluate evaluate,
                                          bool has_selection_data) {
  TrainingHistory history;
  history.phase = phase;
  history.selection_metric = config.selection_metric;
  if (!has_selection_data) {
    history.warnings.push_back(
        "no held-out data: selection falls back to the final epoch");
  }

  const int steps_per_epoch = static_cast<int>(
      (num_examples + config.batch_size - 1) / config.batch_size);
  const int total_steps = steps_per_epoch * config.epochs;
  const int warmup_steps =
      static_cast<int>(std::ceil(config.warmup_fraction * total_steps));

  std::vector<Model> run_models;
  for (double lr : config.learning_rates) {
    for (int r = 0; r < config.runs_per_learning_rate; ++r) {
      RunRecord run;
      run.learning_rate = lr;
      run.run_index = r;
      run.seed = DeriveSeed(config.seed, phase + "/lr=" +
                                             FormatLearningRate(lr) +
                                             "/run=" + std::to_string(r));
      Rng rng(run.seed);
      Model model = initial;
      std::optional<Model> best_model;
      auto params = model.Parameters();
      AdamW optimizer(params, {0.9, 0.999, 1e-8, config.weight_decay});
      std::vector<size_t> order(num_examples);
      for (size_t i = 0; i < num_examples; ++i) order[i] = i;

      for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        Shuffle(order, rng);
        double loss_sum = 0.0;
        for (size_t start = 0; start < num_examples;
             start += config.batch_size) {
          const size_t end =
              std::min(num_examples, start + static_cast<size_t>(config.batch_size));
          const double scale = 1.0 / static_cast<double>(end - start);
          ZeroGradients(params);
          double batch_loss = 0.0;
          for (size_t k = start; k < end; ++k) {
            batch_loss += accumulate(model, order[k], scale);
          }
          loss_sum += batch_loss * scale;
          ClipGradientNorm(params, config.max_grad_norm);
          optimizer.Step(lr * WarmupLinearDecay(optimizer.steps() + 1,
                                                total_steps, warmup_steps));
        }
        EpochRecord record;
        record.epoch = epoch;
        record.train_loss = loss_sum / steps_per_epoch;
        if (has_selection_data) record.selection_value = evaluate(model);
        const bool improves =
            record.selection_value &&
            (!run.best_value || *record.selection_value > *run.best_value);
        if (improves) {
          run.best_value = record.selection_value;
          run.best_epoch = epoch;
          best_model = model;
        }
        run.epochs.push_back(record);
      }
      if (!best_model) {
        if (has_selection_data) {
          history.warnings.push_back(
              "run lr=" + FormatLearningRate(lr) + " #" + std::to_string(r) +
              ": selection metric undefined at every epoch; keeping final "
              "epoch");
        }
        run.best_epoch = config.epochs;
        best_model = std::move(model);
      }
      history.runs.push_back(std::move(run));
      run_models.push_back(std::move(*best_model));
    }
  }

  // Learning rate chosen by the mean best value over its runs; the returned
  // model is that learning rate's best run.
  int selected = -1;
  if (has_selection_data) {
    double best_lr_score = -std::numeric_limits<double>::infinity();
    for (size_t g = 0; g < config.learning_rates.size(); ++g) {
      double sum = 0.0;
      int defined = 0;
      for (int r = 0; r < config.runs_per_learning_rate; ++r) {
        const auto& run = history.runs[g * config.runs_per_learning_rate + r];
        if (run.best_value) {
          sum += *run.best_value;
          ++defined;
        }
      }
      if (defined == 0) continue;
      const double score = sum / defined;
      if (score > best_lr_score) {
        best_lr_score = score;
        int best_run = -1;
        for (int r = 0; r < config.runs_per_learning_rate; ++r) {
          const int idx = static_cast<int>(g) * config.runs_per_learning_rate + r;
          const auto& run = history.runs[idx];
          if (run.best_value &&
              (best_run < 0 || *run.best_value > *history.runs[best_run].best_value)) {
            best_run = idx;
          }
        }
        selected = best_run;
      }
    }
  }
  if (selected < 0) {
    // Lowest final training loss.
    selected = 0;
    for (size_t i = 1; i < history.runs.size(); ++i) {
      if (history.runs[i].epochs.back().train_loss <
          history.runs[selected].epochs.back().train_loss) {
        selected = static_cast<int>(i);
      }
    }
  }
  history.selected_run = selected;
  history.selected_learning_rate = history.runs[selected].learning_rate;
  return {std::move(run_models[selected]), std::move(history)};
}

template <typename T>
std::vector<std::string> DatasetIds(std::span<const T> items) {
  std::set<std::string> ids;
  for (const auto& i : items) ids.insert(i.dataset_id);
  return {ids.begin(), ids.end()};
}

}  // namespace

FinetuneResult Finetune(const RegressionModel& initial,
                        std::span<const JudgedInstance> train,
                        const TrainConfig& config,
                        std::span<const JudgedInstance> dev) {
  config.Validate();
  if (train.empty()) throw PreconditionError("fine-tuning set is empty");
  for (const auto& inst : train) {
    if (!inst.gold_score) {
      throw PreconditionError("training instance " + inst.instance_id +
                              " has no gold score");
    }
  }
  RegressionModel start = initial;
  start.set_ablation(config.ablation);

  // Packing is deterministic, so inputs are built once.
  std::vector<PackedInput> packed;
  packed.reserve(train.size());
  for (const auto& inst : train) {
    packed.push_back(start.Pack(inst.passage, inst.question, inst.reference,
                                inst.candidate, config.ablation));
  }
  std::vector<JudgedInstance> dev_scored;
  for (const auto& inst : dev) {
    if (inst.gold_score) dev_scored.push_back(inst);
  }

  auto accumulate = [&](RegressionModel& model, size_t i, double scale) {
    return model.AccumulateSquaredError(packed[i], *train[i].gold_score, scale)
        .second;
  };
  auto evaluate = [&](const RegressionModel& model) {
    return DevPearson(model, dev_scored, config.dev_pooling);
  };
  auto [model, history] =
      RunGrid(start, train.size(), config, "finetune", accumulate, evaluate,
              !dev_scored.empty());
  history.training_datasets = DatasetIds(train);
  history.selection_datasets =
      DatasetIds(std::span<const JudgedInstance>(dev_scored));
  history.training_examples = train.size();
  history.selection_examples = dev_scored.size();
  return {std::move(model), std::move(history)};
}

PretrainResult Pretrain(const PairClassifier& initial,
                        std::span<const PretrainExample> examples,
                        const TrainConfig& config,
                        std::span<const PretrainExample> heldout) {
  config.Validate();
  if (examples.empty()) throw PreconditionError("pre-training set is empty");
  std::vector<PackedInput> packed;
  packed.reserve(examples.size());
  for (const auto& ex : examples) packed.push_back(initial.Pack(ex));

  auto accumulate = [&](PairClassifier& model, size_t i, double scale) {
    return model.AccumulateCrossEntropy(packed[i], examples[i].label, scale);
  };
  auto evaluate = [&](const PairClassifier& model) -> std::optional<double> {
    return Accuracy(model, heldout);
  };
  auto [model, history] = RunGrid(initial, examples.size(), config, "pretrain",
                                  accumulate, evaluate, !heldout.empty());
  history.training_examples = examples.size();
  history.selection_examples = heldout.size();
  return {std::move(model), std::move(history)};
}

}  // namespace rceval::learned
