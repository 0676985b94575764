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

#ifndef RCEVAL_HEADS_H_
#define RCEVAL_HEADS_H_

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "rceval/corpus.h"
#include "rceval/encoder.h"

namespace rceval::learned {

// y = W . h_cls + b. The bias can be disabled for the literal no-bias form.
class RegressionHead {
 public:
  RegressionHead(int hidden_size, bool use_bias, double initial_bias,
                 double init_stddev, uint64_t seed);
  static RegressionHead Zero(int hidden_size, bool use_bias);

  double Forward(const Eigen::VectorXd& pooled) const;
  // Accumulates parameter gradients for dL/dy and returns dL/dpooled.
  Eigen::VectorXd Backward(const Eigen::VectorXd& pooled, double d_output);

  bool use_bias() const { return use_bias_; }
  int hidden_size() const { return static_cast<int>(weight_.value.rows()); }
  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  const Parameter& weight() const { return weight_; }
  const Parameter& bias() const { return bias_; }

  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

 private:
  RegressionHead() = default;
  Parameter weight_;  // d x 1
  Parameter bias_;    // 1 x 1
  bool use_bias_ = true;
};

// Three logits: FIRST_CORRECT, SECOND_CORRECT, BOTH_CORRECT.
class ClassificationHead {
 public:
  static constexpr int kClasses = 3;

  ClassificationHead(int hidden_size, double init_stddev, uint64_t seed);

  Eigen::VectorXd Forward(const Eigen::VectorXd& pooled) const;
  Eigen::VectorXd Backward(const Eigen::VectorXd& pooled,
                           const Eigen::VectorXd& d_logits);

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  const Parameter& weight() const { return weight_; }
  const Parameter& bias() const { return bias_; }
  std::vector<Parameter*> Parameters();
  std::vector<const Parameter*> Parameters() const;

 private:
  Parameter weight_;  // 3 x d
  Parameter bias_;    // 3 x 1
};

Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);

// Cross-entropy of the softmax of `logits` against `label`; writes
// dL/dlogits = softmax - onehot when `d_logits` is non-null.
double CrossEntropy(const Eigen::VectorXd& logits, PretrainLabel label,
                    Eigen::VectorXd* d_logits);

// Mean of (y_i - yhat_i)^2.
double MeanSquaredError(const std::vector<double>& targets,
                        const std::vector<double>& predictions);

}  // namespace rceval::learned

#endif  // RCEVAL_HEADS_H_
