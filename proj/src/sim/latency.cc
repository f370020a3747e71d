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
#include "ctrace/sim/latency.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace ctrace::sim {

std::optional<double> RangeEntryTime(const NodeSpec& a, const NodeSpec& b,
                                     double range_m, double from_s,
                                     double to_s) {
  double lo = std::max({from_s, a.present_from(), b.present_from()});
  double hi = std::min({to_s, a.present_until(), b.present_until()});
  if (lo > hi) return std::nullopt;
  std::vector<double> cuts = {lo, hi};
  for (const auto* n : {&a, &b}) {
    for (const auto& w : n->path) {
      if (w.t_s > lo && w.t_s < hi) cuts.push_back(w.t_s);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double r2 = range_m * range_m;
  for (size_t i = 0; i < cuts.size(); ++i) {
    double t0 = cuts[i];
    double t1 = i + 1 < cuts.size() ? cuts[i + 1] : t0;
    Position pa0 = *a.PositionAt(t0), pb0 = *b.PositionAt(t0);
    Position pa1 = *a.PositionAt(t1), pb1 = *b.PositionAt(t1);
    double dx = pa0.x - pb0.x, dy = pa0.y - pb0.y;
    if (dx * dx + dy * dy <= r2) return t0;
    if (t1 <= t0) continue;
    double len = t1 - t0;
    double vx = ((pa1.x - pb1.x) - dx) / len;
    double vy = ((pa1.y - pb1.y) - dy) / len;
    double qa = vx * vx + vy * vy;
    double qb = 2 * (dx * vx + dy * vy);
    double qc = dx * dx + dy * dy - r2;
    double disc = qb * qb - 4 * qa * qc;
    if (qa == 0 || disc < 0) continue;
    double root = (-qb - std::sqrt(disc)) / (2 * qa);
    if (root >= 0 && root <= len) return t0 + root;
  }
  return std::nullopt;
}

std::vector<PairLatency> DiscoveryLatencies(const Scenario& scenario,
                                            const SimTrace& trace) {
  double end_s = static_cast<double>(trace.duration_us) / 1e6;
  std::vector<PairLatency> out;
  std::map<std::pair<int, int>, size_t> index;
  int n = static_cast<int>(scenario.nodes.size());
  for (int rx = 0; rx < n; ++rx) {
    for (int tx = 0; tx < n; ++tx) {
      if (rx == tx) continue;
      auto entry = RangeEntryTime(scenario.nodes[rx], scenario.nodes[tx],
                                  scenario.radio.range_m, 0, end_s);
      if (!entry.has_value()) continue;
      index[{rx, tx}] = out.size();
      out.push_back({rx, tx, *entry, std::nullopt});
    }
  }
  for (const auto& r : trace.rx) {
    auto it = index.find({r.rx_node, r.tx_node});
    if (it == index.end()) continue;
    PairLatency& p = out[it->second];
    double t_ms = static_cast<double>(r.time_us) / 1000.0;
    if (!p.latency_ms.has_value() && r.tx_start_us >= p.range_entry_s * 1e6 - 1) {
      p.latency_ms = std::max(0.0, t_ms - p.range_entry_s * 1000.0);
    }
  }
  return out;
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  size_t rank = static_cast<size_t>(std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<size_t>(rank, 1, values.size());
  return values[rank - 1];
}

LatencySummary Summarize(const std::vector<PairLatency>& latencies) {
  LatencySummary s;
  s.pairs = latencies.size();
  std::vector<double> v;
  for (const auto& p : latencies) {
    if (p.latency_ms.has_value()) {
      v.push_back(*p.latency_ms);
    } else {
      ++s.censored;
    }
  }
  if (v.empty()) return s;
  s.min_ms = *std::min_element(v.begin(), v.end());
  s.max_ms = *std::max_element(v.begin(), v.end());
  s.median_ms = Percentile(v, 0.5);
  s.p95_ms = Percentile(v, 0.95);
  return s;
}

}  // namespace ctrace::sim
