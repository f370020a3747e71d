// Copyright 2026 The ctrace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "ctrace/harness/outcome.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ctrace::harness {

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kDefended:
      return "DEFENDED";
    case Verdict::kVulnerable:
      return "VULNERABLE";
    case Verdict::kNotApplicable:
      return "N/A";
  }
  return "N/A";
}

void ScenarioOutcome::AddMetric(std::string name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  AddMetric(std::move(name), std::string(buf));
}

const Metric* ScenarioOutcome::FindMetric(std::string_view name) const {
  for (const auto& m : metrics) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

size_t ScenarioOutcome::CountFor(std::string_view node,
                                 server::OrderTag order) const {
  size_t n = 0;
  for (const auto& x : notifications) {
    if (x.node == node && x.order == order) n += x.total;
  }
  return n;
}

nlohmann::json ScenarioOutcome::ToJson() const {
  nlohmann::json out;
  out["scenario"] = scenario;
  out["mode"] = mode;
  out["verdict"] = std::string(VerdictName(verdict));
  nlohmann::json notes = nlohmann::json::array();
  for (const auto& n : notifications) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [cat, c] : n.counts) {
      counts[std::string(store::CategoryName(cat))] = c;
    }
    notes.push_back({{"node", n.node},
                     {"order", std::string(server::OrderTagName(n.order))},
                     {"phase", n.phase},
                     {"total", n.total},
                     {"categories", counts}});
  }
  out["notifications"] = notes;
  nlohmann::json m = nlohmann::json::object();
  for (const auto& metric : metrics) m[metric.name] = metric.value;
  out["metrics"] = m;
  return out;
}

std::string ScenarioOutcome::FormatTable() const {
  std::ostringstream out;
  out << "scenario: " << scenario << "  mode: " << mode
      << "  verdict: " << VerdictName(verdict) << "\n\n";
  std::vector<std::vector<std::string>> rows;
  for (const auto& n : notifications) {
    std::string cats;
    for (const auto& [cat, c] : n.counts) {
      if (!cats.empty()) cats += " ";
      cats += std::string(store::CategoryName(cat)) + "=" + std::to_string(c);
    }
    rows.push_back({n.node, std::string(server::OrderTagName(n.order)), n.phase,
                    std::to_string(n.total), cats.empty() ? "-" : cats});
  }
  if (rows.empty()) {
    out << "no notifications\n";
  } else {
    out << FormatTextTable({"node", "order", "phase", "matches", "categories"}, rows);
  }
  if (!metrics.empty()) {
    std::vector<std::vector<std::string>> mrows;
    for (const auto& m : metrics) mrows.push_back({m.name, m.value});
    out << "\n" << FormatTextTable({"metric", "value"}, mrows);
  }
  return out.str();
}

std::string FormatTextTable(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> width(headers.size());
  for (size_t i = 0; i < headers.size(); ++i) width[i] = headers[i].size();
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], row[i].size());
    }
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < width.size(); ++i) {
      std::string cell = i < cells.size() ? cells[i] : "";
      out << cell;
      if (i + 1 < width.size()) out << std::string(width[i] - cell.size() + 2, ' ');
    }
    out << "\n";
  };
  line(headers);
  std::vector<std::string> rule;
  for (size_t w : width) rule.push_back(std::string(w, '-'));
  line(rule);
  for (const auto& row : rows) line(row);
  return out.str();
}

absl::Status WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) return absl::DataLossError("short write to " + path);
  return absl::OkStatus();
}

}  // namespace ctrace::harness
