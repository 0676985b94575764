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

#include "rceval/score_file.h"

#include <algorithm>
#include <unordered_set>

#include "json.hpp"
#include "rceval/corpus.h"
#include "rceval/errors.h"

namespace rceval {

std::string SerializeScores(const ScoreEntries& entries) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [id, score] : entries) j[id] = score;
  return j.dump(2) + "\n";
}

void WriteScoreFile(const std::filesystem::path& path,
                    const ScoreEntries& entries) {
  WriteStringToFile(path, SerializeScores(entries));
}

ScoreEntries ParseScores(std::string_view text) {
  std::unordered_set<std::string> seen;
  std::string duplicate;
  // The parser keeps only the last value of a repeated key, so duplicates
  // are caught while parsing.
  auto callback = [&](int depth, nlohmann::ordered_json::parse_event_t event,
                      nlohmann::ordered_json& parsed) {
    if (event == nlohmann::ordered_json::parse_event_t::key && depth == 1 &&
        duplicate.empty()) {
      const std::string key = parsed.get<std::string>();
      if (!seen.insert(key).second) duplicate = key;
    }
    return true;
  };
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text.begin(), text.end(), callback);
  } catch (const nlohmann::json::parse_error& e) {
    const size_t byte = std::min<size_t>(e.byte, text.size());
    const int line =
        1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ParseError("line " + std::to_string(line), e.what());
  }
  if (!duplicate.empty()) {
    throw ParseError(duplicate, "duplicate instance id in score file");
  }
  if (!doc.is_object()) {
    throw ParseError("top level", "score file must be a JSON object");
  }
  ScoreEntries entries;
  entries.reserve(doc.size());
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_number()) throw ParseError(id, "score is not a number");
    entries.emplace_back(id, value.get<double>());
  }
  return entries;
}

ScoreEntries ReadScoreFile(const std::filesystem::path& path) {
  return ParseScores(ReadFileToString(path));
}

}  // namespace rceval
