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

#include "rceval/optimizer.h"

#include <algorithm>
#include <cmath>

namespace rceval::learned {

AdamW::AdamW(std::vector<Parameter*> params, const AdamWConfig& config)
    : params_(std::move(params)), config_(config) {
  for (const Parameter* p : params_) {
    first_moment_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    second_moment_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamW::Step(double learning_rate) {
  ++step_;
  const double bc1 = 1.0 - std::pow(config_.beta1, step_);
  const double bc2 = 1.0 - std::pow(config_.beta2, step_);
  for (size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    auto& m = first_moment_[i];
    auto& v = second_moment_[i];
    m = config_.beta1 * m + (1.0 - config_.beta1) * p.grad;
    v = config_.beta2 * v +
        (1.0 - config_.beta2) * p.grad.cwiseProduct(p.grad);
    const Eigen::ArrayXXd update =
        (m.array() / bc1) / ((v.array() / bc2).sqrt() + config_.epsilon);
    if (p.decay && config_.weight_decay > 0.0) {
      p.value *= 1.0 - learning_rate * config_.weight_decay;
    }
    p.value.array() -= learning_rate * update;
  }
}

double WarmupLinearDecay(int step, int total_steps, int warmup_steps) {
  if (warmup_steps > 0 && step <= warmup_steps) {
    return static_cast<double>(step) / warmup_steps;
  }
  const int remaining = total_steps - warmup_steps;
  if (remaining <= 0) return 1.0;
  return std::max(0.0, static_cast<double>(total_steps - step + 1) /
                           (remaining + 1));
}

double ClipGradientNorm(const std::vector<Parameter*>& params,
                        double max_norm) {
  double sq = 0.0;
  for (const Parameter* p : params) sq += p->grad.squaredNorm();
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (Parameter* p : params) p->grad *= scale;
  }
  return norm;
}

void ZeroGradients(const std::vector<Parameter*>& params) {
  for (Parameter* p : params) p->ZeroGrad();
}

}  // namespace rceval::learned
