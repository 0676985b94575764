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

#include <map>

#include "rceval/corpus.h"
#include "rceval/errors.h"

namespace rceval {

double KrippendorffAlpha(const AnnotationTable& table) {
  // Coincidence matrix over the values 1..5, interval difference (c - k)^2.
  constexpr int kValues = 5;
  double coincidence[kValues][kValues] = {};
  for (const auto& [unit_id, scores] : table.units()) {
    const int m = static_cast<int>(scores.size());
    if (m < 2) continue;
    int counts[kValues] = {};
    for (const auto& [annotator, score] : scores) ++counts[score - 1];
    for (int c = 0; c < kValues; ++c) {
      for (int k = 0; k < kValues; ++k) {
        const int pairs = counts[c] * (counts[k] - (c == k ? 1 : 0));
        coincidence[c][k] += static_cast<double>(pairs) / (m - 1);
      }
    }
  }
  double marginals[kValues] = {};
  double n = 0.0;
  for (int c = 0; c < kValues; ++c) {
    for (int k = 0; k < kValues; ++k) marginals[c] += coincidence[c][k];
    n += marginals[c];
  }
  if (n <= 0.0) {
    throw PreconditionError("no pairable values: every unit has < 2 scores");
  }
  double observed = 0.0;
  double expected = 0.0;
  for (int c = 0; c < kValues; ++c) {
    for (int k = 0; k < kValues; ++k) {
      const double delta = static_cast<double>((c - k) * (c - k));
      observed += coincidence[c][k] * delta;
      expected += marginals[c] * marginals[k] * delta;
    }
  }
  observed /= n;
  expected /= n * (n - 1.0);
  if (expected == 0.0) return 1.0;
  return 1.0 - observed / expected;
}

}  // namespace rceval
