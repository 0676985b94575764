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

#ifndef RCEVAL_REPORTS_H_
#define RCEVAL_REPORTS_H_

#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rceval/corpus.h"
#include "rceval/metaeval.h"

namespace rceval::reports {

using ordered_json = nlohmann::ordered_json;

ordered_json ToJson(const metaeval::CorrelationReport& report);
ordered_json ToJson(const metaeval::SourceCorrelationReport& report);
ordered_json ToJson(const metaeval::PreferenceReport& report);
ordered_json ToJson(const std::vector<metaeval::DivergenceEntry>& entries);
ordered_json ToJson(const CorpusStatistics& stats);
ordered_json ToJson(const std::vector<ValidationIssue>& issues);

// Datasets x (splits) columns plus an average block, one row per report.
std::string FormatCorrelationTable(
    std::span<const metaeval::CorrelationReport> reports);
// Datasets + average columns, accuracy in percent, one row per report.
std::string FormatPreferenceTable(
    std::span<const metaeval::PreferenceReport> reports);
std::string FormatSourceTable(const metaeval::SourceCorrelationReport& report);
std::string FormatDivergenceTable(
    const std::vector<metaeval::DivergenceEntry>& entries);
std::string FormatStatisticsTable(const CorpusStatistics& stats);

// Lowercase hex SHA-256 of the compact dump of `manifest`.
std::string ManifestHash(const ordered_json& manifest);

// Returns `report` with "manifest" and "manifest_sha256" fields appended.
ordered_json EmbedManifest(ordered_json report, const ordered_json& manifest);

}  // namespace rceval::reports

#endif  // RCEVAL_REPORTS_H_
