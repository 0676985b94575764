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

#ifndef RCEVAL_RANDOM_H_
#define RCEVAL_RANDOM_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace rceval {

// The standard distributions are implementation defined; these helpers
// only rely on the exactly specified mt19937_64 engine so that runs are
// reproducible across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline size_t UniformIndex(Rng& rng, size_t n) {
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit = Rng::max() - (Rng::max() % bound);
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<size_t>(x % bound);
}

// Uniform real in [0, 1) using the top 53 bits.
inline double UniformReal(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool CoinFlip(Rng& rng) { return (rng() >> 63) != 0; }

// Box-Muller; discards the second variate to stay stateless.
inline double StandardNormal(Rng& rng) {
  double u1 = UniformReal(rng);
  while (u1 <= 0.0) u1 = UniformReal(rng);
  const double u2 = UniformReal(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename T>
void Shuffle(std::vector<T>& v, Rng& rng) {
  for (size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[UniformIndex(rng, i)]);
  }
}

}  // namespace rceval

#endif  // RCEVAL_RANDOM_H_
