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

#ifndef RCEVAL_STATS_H_
#define RCEVAL_STATS_H_

#include <span>

namespace rceval {

// Sample Pearson correlation. Throws PreconditionError on mismatched or
// too-short inputs and UndefinedCorrelationError when either side has zero
// variance.
double Pearson(std::span<const double> xs, std::span<const double> ys);

}  // namespace rceval

#endif  // RCEVAL_STATS_H_
