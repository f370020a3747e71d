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
#ifndef CTRACE_HARNESS_OUTCOME_H_
#define CTRACE_HARNESS_OUTCOME_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "ctrace/harness/client_app.h"
#include "ctrace/server/tracing_server.h"
#include "json.hpp"

namespace ctrace::harness {

enum class Verdict { kDefended, kVulnerable, kNotApplicable };

std::string_view VerdictName(Verdict v);

struct Notification {
  std::string node;
  server::OrderTag order = server::OrderTag::kFirstOrder;
  CategoryCounts counts;
  size_t total = 0;
  // Which check produced it, e.g. "after-first-report".
  std::string phase;
};

struct Metric {
  std::string name;
  std::string value;
};

struct ScenarioOutcome {
  std::string scenario;
  std::string mode;
  std::vector<Notification> notifications;
  Verdict verdict = Verdict::kNotApplicable;
  std::vector<Metric> metrics;

  void AddMetric(std::string name, std::string value) {
    metrics.push_back({std::move(name), std::move(value)});
  }
  void AddMetric(std::string name, double value);
  void AddMetric(std::string name, size_t value) {
    AddMetric(std::move(name), std::to_string(value));
  }
  const Metric* FindMetric(std::string_view name) const;

  // Notifications of one node with the given order, in any phase.
  size_t CountFor(std::string_view node, server::OrderTag order) const;

  nlohmann::json ToJson() const;
  // Human-readable aligned table.
  std::string FormatTable() const;
};

// Aligned text table; every row must have headers.size() cells.
std::string FormatTextTable(const std::vector<std::string>& headers,
                            const std::vector<std::vector<std::string>>& rows);

absl::Status WriteFile(const std::string& path, std::string_view content);

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_OUTCOME_H_
