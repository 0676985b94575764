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

#ifndef RCEVAL_TESTS_GRADIENT_CHECK_H_
#define RCEVAL_TESTS_GRADIENT_CHECK_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rceval/encoder.h"
#include "rceval/random.h"

namespace rceval::testing {

struct GradientProbe {
  const learned::Parameter* param = nullptr;
  int row = 0;
  int col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

// Both gradients below this magnitude count as agreeing zeros.
inline constexpr double kGradientFloor = 1e-8;

inline double RelativeError(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  if (scale < kGradientFloor) return 0.0;
  return std::abs(a - b) / scale;
}

// Central differences on `probes` random entries of `params`. `loss`
// evaluates the model; `backward` zeroes and fills the analytic gradients.
inline std::vector<GradientProbe> CheckGradients(
    const std::vector<learned::Parameter*>& params,
    const std::function<double()>& loss, const std::function<void()>& backward,
    int probes, Rng& rng, double step = 1e-5) {
  backward();
  std::vector<GradientProbe> out;
  for (int k = 0; k < probes; ++k) {
    learned::Parameter* p = params[UniformIndex(rng, params.size())];
    GradientProbe probe;
    probe.param = p;
    probe.row = static_cast<int>(UniformIndex(rng, p->value.rows()));
    probe.col = static_cast<int>(UniformIndex(rng, p->value.cols()));
    probe.analytic = p->grad(probe.row, probe.col);
    double& v = p->value(probe.row, probe.col);
    const double saved = v;
    v = saved + step;
    const double up = loss();
    v = saved - step;
    const double down = loss();
    v = saved;
    probe.numeric = (up - down) / (2.0 * step);
    probe.relative_error = RelativeError(probe.analytic, probe.numeric);
    out.push_back(probe);
  }
  return out;
}

}  // namespace rceval::testing

#endif  // RCEVAL_TESTS_GRADIENT_CHECK_H_
