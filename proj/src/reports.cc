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

#include "rceval/reports.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "rceval/hashing.h"

namespace rceval::reports {
namespace {

ordered_json Optional(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::string Fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

std::string Cell(const std::optional<double>& v) {
  return v ? Fixed(*v, 3) : "n/a";
}

std::string Pad(const std::string& s, size_t width) {
  if (s.size() >= width) return s;
  return s + std::string(width - s.size(), ' ');
}

}  // namespace

ordered_json ToJson(const metaeval::CorrelationReport& report) {
  ordered_json j;
  j["metric"] = report.metric;
  j["datasets"] = report.datasets;
  j["splits"] = report.splits;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["dataset"] = c.dataset_id;
    cell["split"] = c.split;
    cell["n"] = c.n;
    cell["r"] = Optional(c.r);
    if (!c.r) cell["undefined_reason"] = c.undefined_reason;
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  ordered_json average = ordered_json::object();
  for (const auto& split : report.splits) {
    auto it = report.average.find(split);
    average[split] =
        it == report.average.end() ? ordered_json(nullptr) : Optional(it->second);
  }
  j["average"] = std::move(average);
  j["average_kind"] = "unweighted mean over datasets";
  return j;
}

ordered_json ToJson(const metaeval::SourceCorrelationReport& report) {
  ordered_json j;
  j["metric"] = report.metric;
  ordered_json cells = ordered_json::array();
  for (const auto& c : report.cells) {
    ordered_json cell;
    cell["dataset"] = c.dataset_id;
    cell["source"] = std::string(ToString(c.source));
    cell["n"] = c.n;
    cell["r"] = Optional(c.r);
    if (!c.r) cell["undefined_reason"] = c.undefined_reason;
    cells.push_back(std::move(cell));
  }
  j["cells"] = std::move(cells);
  return j;
}

ordered_json ToJson(const metaeval::PreferenceReport& report) {
  auto cells_json = [](const std::vector<metaeval::PreferenceCell>& cells) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : cells) {
      arr.push_back({{"key", c.key},
                     {"wins", c.wins},
                     {"ties", c.ties},
                     {"losses", c.losses},
                     {"pairs", c.pairs()},
                     {"accuracy", c.accuracy}});
    }
    return arr;
  };
  ordered_json j;
  j["metric"] = report.metric;
  j["datasets"] = cells_json(report.datasets);
  j["phenomena"] = cells_json(report.phenomena);
  j["average"] = report.average;
  return j;
}

ordered_json ToJson(const std::vector<metaeval::DivergenceEntry>& entries) {
  ordered_json arr = ordered_json::array();
  for (const auto& e : entries) {
    arr.push_back({{"rank", e.rank},
                   {"instance_id", e.instance_id},
                   {"score_a", e.score_a},
                   {"score_b", e.score_b},
                   {"delta", e.delta}});
  }
  return arr;
}

ordered_json ToJson(const CorpusStatistics& stats) {
  auto cell_json = [](const CorpusStatsCell& c) {
    return ordered_json{{"passages", c.passages},
                        {"question_reference_pairs", c.question_reference_pairs},
                        {"candidates", c.candidates},
                        {"mean_passage_tokens", c.mean_passage_tokens},
                        {"mean_question_tokens", c.mean_question_tokens},
                        {"mean_reference_tokens", c.mean_reference_tokens},
                        {"mean_candidate_tokens", c.mean_candidate_tokens}};
  };
  ordered_json j;
  ordered_json cells = ordered_json::array();
  for (const auto& [key, cell] : stats.cells) {
    ordered_json c = cell_json(cell);
    c["dataset"] = key.first;
    c["split"] = key.second;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  ordered_json totals = ordered_json::object();
  for (const auto& [split, cell] : stats.totals_by_split) {
    totals[split] = cell_json(cell);
  }
  j["totals"] = std::move(totals);
  return j;
}

ordered_json ToJson(const std::vector<ValidationIssue>& issues) {
  ordered_json arr = ordered_json::array();
  for (const auto& i : issues) {
    arr.push_back({{"record", i.record_id},
                   {"invariant", i.invariant},
                   {"message", i.message}});
  }
  return arr;
}

std::string FormatCorrelationTable(
    std::span<const metaeval::CorrelationReport> reports) {
  if (reports.empty()) return "";
  const auto& first = reports.front();
  size_t name_w = 14;
  for (const auto& r : reports) name_w = std::max(name_w, r.metric.size() + 2);
  const size_t col_w = 8;
  const size_t block_w = col_w * first.splits.size() + 2;
  std::ostringstream out;
  out << Pad("", name_w);
  for (const auto& ds : first.datasets) out << "| " << Pad(ds, block_w - 2);
  out << "| " << Pad("Avg.", block_w - 2) << "\n";
  out << Pad("", name_w);
  for (size_t i = 0; i <= first.datasets.size(); ++i) {
    out << "| ";
    for (const auto& s : first.splits) out << Pad(s, col_w);
  }
  out << "\n";
  for (const auto& report : reports) {
    out << Pad(report.metric, name_w);
    for (const auto& ds : first.datasets) {
      out << "| ";
      for (const auto& s : first.splits) {
        const auto* cell = report.Find(ds, s);
        out << Pad(cell ? Cell(cell->r) : "n/a", col_w);
      }
    }
    out << "| ";
    for (const auto& s : first.splits) {
      auto it = report.average.find(s);
      out << Pad(it == report.average.end() ? "n/a" : Cell(it->second), col_w);
    }
    out << "\n";
  }
  return out.str();
}

namespace {

using CellsOf = const std::vector<metaeval::PreferenceCell>& (*)(
    const metaeval::PreferenceReport&);

void PreferenceBlock(std::ostringstream& out,
                     std::span<const metaeval::PreferenceReport> reports,
                     CellsOf cells_of, bool with_average, size_t name_w) {
  const size_t col_w = 12;
  out << Pad("", name_w);
  for (const auto& c : cells_of(reports.front())) out << Pad(c.key, col_w);
  if (with_average) out << Pad("Avg.", col_w);
  out << "\n";
  for (const auto& report : reports) {
    out << Pad(report.metric, name_w);
    for (const auto& head : cells_of(reports.front())) {
      std::string value = "n/a";
      for (const auto& c : cells_of(report)) {
        if (c.key == head.key) value = Fixed(100.0 * c.accuracy, 1);
      }
      out << Pad(value, col_w);
    }
    if (with_average) out << Pad(Fixed(100.0 * report.average, 1), col_w);
    out << "\n";
  }
}

}  // namespace

std::string FormatPreferenceTable(
    std::span<const metaeval::PreferenceReport> reports) {
  if (reports.empty()) return "";
  size_t name_w = 14;
  for (const auto& r : reports) name_w = std::max(name_w, r.metric.size() + 2);
  std::ostringstream out;
  PreferenceBlock(
      out, reports,
      [](const metaeval::PreferenceReport& r)
          -> const std::vector<metaeval::PreferenceCell>& { return r.datasets; },
      true, name_w);
  out << "\n";
  PreferenceBlock(
      out, reports,
      [](const metaeval::PreferenceReport& r)
          -> const std::vector<metaeval::PreferenceCell>& { return r.phenomena; },
      false, name_w);
  return out.str();
}

std::string FormatSourceTable(const metaeval::SourceCorrelationReport& report) {
  std::ostringstream out;
  out << Pad("dataset", 16) << Pad("source", 18) << Pad("n", 8) << "r\n";
  for (const auto& c : report.cells) {
    out << Pad(c.dataset_id, 16) << Pad(std::string(ToString(c.source)), 18)
        << Pad(std::to_string(c.n), 8) << Cell(c.r) << "\n";
  }
  return out.str();
}

std::string FormatDivergenceTable(
    const std::vector<metaeval::DivergenceEntry>& entries) {
  std::ostringstream out;
  out << Pad("rank", 6) << Pad("instance_id", 28) << Pad("a", 10)
      << Pad("b", 10) << "delta\n";
  for (const auto& e : entries) {
    out << Pad(std::to_string(e.rank), 6) << Pad(e.instance_id, 28)
        << Pad(Fixed(e.score_a, 3), 10) << Pad(Fixed(e.score_b, 3), 10)
        << Fixed(e.delta, 3) << "\n";
  }
  return out.str();
}

std::string FormatStatisticsTable(const CorpusStatistics& stats) {
  std::ostringstream out;
  out << Pad("dataset", 16) << Pad("split", 12) << Pad("passages", 10)
      << Pad("q/a pairs", 11) << Pad("cands", 8) << Pad("len(p)", 9)
      << Pad("len(q)", 9) << Pad("len(r)", 9) << "len(c)\n";
  auto row = [&](const std::string& ds, const std::string& split,
                 const CorpusStatsCell& c) {
    out << Pad(ds, 16) << Pad(split, 12) << Pad(std::to_string(c.passages), 10)
        << Pad(std::to_string(c.question_reference_pairs), 11)
        << Pad(std::to_string(c.candidates), 8)
        << Pad(Fixed(c.mean_passage_tokens, 1), 9)
        << Pad(Fixed(c.mean_question_tokens, 1), 9)
        << Pad(Fixed(c.mean_reference_tokens, 1), 9)
        << Fixed(c.mean_candidate_tokens, 1) << "\n";
  };
  for (const auto& [key, cell] : stats.cells) row(key.first, key.second, cell);
  for (const auto& [split, cell] : stats.totals_by_split) row("Total", split, cell);
  return out.str();
}

std::string ManifestHash(const ordered_json& manifest) {
  return Sha256Hex(manifest.dump());
}

ordered_json EmbedManifest(ordered_json report, const ordered_json& manifest) {
  report["manifest"] = manifest;
  report["manifest_sha256"] = ManifestHash(manifest);
  return report;
}

}  // namespace rceval::reports
