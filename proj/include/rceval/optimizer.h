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

#ifndef RCEVAL_OPTIMIZER_H_
#define RCEVAL_OPTIMIZER_H_

#include <Eigen/Dense>

#include <vector>

#include "rceval/encoder.h"

namespace rceval::learned {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.01;
};

// Adam with decoupled weight decay. Parameters flagged `decay = false`
// (biases, layer-norm terms) are not decayed.
class AdamW {
 public:
  AdamW(std::vector<Parameter*> params, const AdamWConfig& config);

  void Step(double learning_rate);
  int steps() const { return step_; }

 private:
  std::vector<Parameter*> params_;
  AdamWConfig config_;
  std::vector<Eigen::MatrixXd> first_moment_;
  std::vector<Eigen::MatrixXd> second_moment_;
  int step_ = 0;
};

// Multiplier for `step` (1-based): linear warmup over `warmup_steps`, then
// linear decay that reaches 1 / (total - warmup + 1) on the last step.
double WarmupLinearDecay(int step, int total_steps, int warmup_steps);

// Rescales all gradients so their joint L2 norm is at most `max_norm`.
// Returns the norm before clipping. max_norm <= 0 disables clipping.
double ClipGradientNorm(const std::vector<Parameter*>& params, double max_norm);

void ZeroGradients(const std::vector<Parameter*>& params);

}  // namespace rceval::learned

#endif  // RCEVAL_OPTIMIZER_H_
