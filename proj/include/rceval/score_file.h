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

#ifndef RCEVAL_SCORE_FILE_H_
#define RCEVAL_SCORE_FILE_H_

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rceval {

// Shared score-file format: a JSON object mapping instance_id -> number.
using ScoreEntries = std::vector<std::pair<std::string, double>>;

std::string SerializeScores(const ScoreEntries& entries);
void WriteScoreFile(const std::filesystem::path& path,
                    const ScoreEntries& entries);

// Entries in file order. Duplicate ids, non-numeric values or a non-object
// document throw ParseError.
ScoreEntries ParseScores(std::string_view text);
ScoreEntries ReadScoreFile(const std::filesystem::path& path);

}  // namespace rceval

#endif  // RCEVAL_SCORE_FILE_H_
