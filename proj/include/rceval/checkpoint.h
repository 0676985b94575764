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

#ifndef RCEVAL_CHECKPOINT_H_
#define RCEVAL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "rceval/learned.h"

namespace rceval::learned {

// On-disk parameter format version. Bumped on any layout change; loading a
// different version is an explicit incompatibility error.
inline constexpr uint32_t kCheckpointFormatVersion = 1;

inline constexpr char kParamsFile[] = "params.bin";
inline constexpr char kProvenanceFile[] = "provenance.json";
inline constexpr char kProbeFile[] = "probe.json";
inline constexpr char kIncompleteMarker[] = "INCOMPLETE";
inline constexpr char kLockFile[] = ".lock";

struct CheckpointMetadata {
  std::string phase;
  TrainConfig config;
  nlohmann::ordered_json data_fingerprints = nlohmann::ordered_json::object();
  nlohmann::ordered_json manifest = nlohmann::ordered_json::object();
  TrainingHistory history;
};

nlohmann::ordered_json ToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const nlohmann::json& j, TrainConfig defaults);
nlohmann::ordered_json ToJson(const TrainingHistory& history);

// Writes params.bin, provenance.json, probe.json into `dir` and removes any
// INCOMPLETE marker once everything is on disk.
void SaveCheckpoint(const RegressionModel& model,
                    const CheckpointMetadata& metadata,
                    const std::filesystem::path& dir);
void SaveCheckpoint(const PairClassifier& model,
                    const CheckpointMetadata& metadata,
                    const std::filesystem::path& dir);

// Throws CheckpointError for truncated or corrupt files, a format version
// mismatch, an INCOMPLETE marker, or a probe score that does not reproduce
// bit for bit.
RegressionModel LoadRegressionCheckpoint(const std::filesystem::path& dir);
PairClassifier LoadClassifierCheckpoint(const std::filesystem::path& dir);

// SHA-256 of params.bin.
std::string ModelFingerprint(const std::filesystem::path& dir);

// Fixed probe input scored at save time and re-checked at load time.
struct ProbeInput {
  std::string passage;
  std::string question;
  std::string reference;
  std::string candidate;
};
const ProbeInput& DefaultProbe();

// Exclusive lock on a checkpoint directory held for the object's lifetime.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
};

}  // namespace rceval::learned

#endif  // RCEVAL_CHECKPOINT_H_
