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

#ifndef RCEVAL_HASHING_H_
#define RCEVAL_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace rceval {

// 64-bit FNV-1a. Stable across platforms; used for token hashing and
// checksums, never for anything security relevant.
uint64_t Fnv1a64(std::string_view data, uint64_t basis = 0xcbf29ce484222325ULL);

// Lowercase hex SHA-256 digest.
std::string Sha256Hex(std::string_view data);

// Sub-seed derived from a base seed and a label ("finetune/lr=2e-05/run=0").
// All randomness in a run flows from one user seed through this function.
uint64_t DeriveSeed(uint64_t base_seed, std::string_view label);

}  // namespace rceval

#endif  // RCEVAL_HASHING_H_
