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

#include "rceval/heads.h"

#include <cmath>

#include "rceval/errors.h"
#include "rceval/hashing.h"
#include "rceval/random.h"

namespace rceval::learned {
namespace {

Eigen::MatrixXd RandomNormal(int rows, int cols, double stddev, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = stddev * StandardNormal(rng);
  }
  return m;
}

}  // namespace

RegressionHead::RegressionHead(int hidden_size, bool use_bias,
                               double initial_bias, double init_stddev,
                               uint64_t seed)
    : use_bias_(use_bias) {
  Rng rng(DeriveSeed(seed, "head/regression"));
  weight_ = Parameter("head.regression.weight",
                      RandomNormal(hidden_size, 1, init_stddev, rng), true);
  bias_ = Parameter("head.regression.bias",
                    Eigen::MatrixXd::Constant(1, 1, use_bias ? initial_bias : 0.0),
                    false);
}

RegressionHead RegressionHead::Zero(int hidden_size, bool use_bias) {
  RegressionHead head;
  head.use_bias_ = use_bias;
  head.weight_ = Parameter("head.regression.weight",
                           Eigen::MatrixXd::Zero(hidden_size, 1), true);
  head.bias_ = Parameter("head.regression.bias", Eigen::MatrixXd::Zero(1, 1),
                         false);
  return head;
}

double RegressionHead::Forward(const Eigen::VectorXd& pooled) const {
  double y = weight_.value.col(0).dot(pooled);
  if (use_bias_) y += bias_.value(0, 0);
  return y;
}

Eigen::VectorXd RegressionHead::Backward(const Eigen::VectorXd& pooled,
                                         double d_output) {
  weight_.grad.col(0) += d_output * pooled;
  if (use_bias_) bias_.grad(0, 0) += d_output;
  return d_output * weight_.value.col(0);
}

std::vector<Parameter*> RegressionHead::Parameters() {
  if (use_bias_) return {&weight_, &bias_};
  return {&weight_};
}

std::vector<const Parameter*> RegressionHead::Parameters() const {
  if (use_bias_) return {&weight_, &bias_};
  return {&weight_};
}

ClassificationHead::ClassificationHead(int hidden_size, double init_stddev,
                                       uint64_t seed) {
  Rng rng(DeriveSeed(seed, "head/classification"));
  weight_ = Parameter("head.classification.weight",
                      RandomNormal(kClasses, hidden_size, init_stddev, rng),
                      true);
  bias_ = Parameter("head.classification.bias",
                    Eigen::MatrixXd::Zero(kClasses, 1), false);
}

Eigen::VectorXd ClassificationHead::Forward(
    const Eigen::VectorXd& pooled) const {
  return weight_.value * pooled + bias_.value.col(0);
}

Eigen::VectorXd ClassificationHead::Backward(const Eigen::VectorXd& pooled,
                                             const Eigen::VectorXd& d_logits) {
  weight_.grad.noalias() += d_logits * pooled.transpose();
  bias_.grad.col(0) += d_logits;
  return weight_.value.transpose() * d_logits;
}

std::vector<Parameter*> ClassificationHead::Parameters() {
  return {&weight_, &bias_};
}

std::vector<const Parameter*> ClassificationHead::Parameters() const {
  return {&weight_, &bias_};
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits) {
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

double CrossEntropy(const Eigen::VectorXd& logits, PretrainLabel label,
                    Eigen::VectorXd* d_logits) {
  const int y = static_cast<int>(label);
  const double max = logits.maxCoeff();
  const double log_sum =
      max + std::log((logits.array() - max).exp().sum());
  if (d_logits != nullptr) {
    *d_logits = Softmax(logits);
    (*d_logits)(y) -= 1.0;
  }
  return log_sum - logits(y);
}

double MeanSquaredError(const std::vector<double>& targets,
                        const std::vector<double>& predictions) {
  if (targets.size() != predictions.size() || targets.empty()) {
    throw PreconditionError("MSE needs equal-length nonempty inputs");
  }
  double sum = 0.0;
  for (size_t i = 0; i < targets.size(); ++i) {
    const double e = targets[i] - predictions[i];
    sum += e * e;
  }
  return sum / static_cast<double>(targets.size());
}

}  // namespace rceval::learned
