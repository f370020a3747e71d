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
#ifndef CTRACE_SIM_LATENCY_H_
#define CTRACE_SIM_LATENCY_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "ctrace/sim/scenario.h"
#include "ctrace/sim/simulator.h"

namespace ctrace::sim {

// First time in [from_s, to_s] at which the two nodes are within range_m,
// solved exactly over the piecewise-linear paths.
std::optional<double> RangeEntryTime(const NodeSpec& a, const NodeSpec& b,
                                     double range_m, double from_s,
                                     double to_s);

// Discovery of tx by rx, measured from range entry to the end of the first
// packet rx decodes from tx. Censored when the run ends first.
struct PairLatency {
  int rx_node = 0;
  int tx_node = 0;
  double range_entry_s = 0;
  std::optional<double> latency_ms;
};

// Every ordered pair that comes within range during the run.
std::vector<PairLatency> DiscoveryLatencies(const Scenario& scenario,
                                            const SimTrace& trace);

struct LatencySummary {
  size_t pairs = 0;
  size_t censored = 0;
  double min_ms = 0;
  double median_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
};

// Nearest-rank percentile; q in (0, 1].
double Percentile(std::vector<double> values, double q);

LatencySummary Summarize(const std::vector<PairLatency>& latencies);

}  // namespace ctrace::sim

#endif  // CTRACE_SIM_LATENCY_H_
