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
#ifndef CTRACE_SIM_SCENARIO_H_
#define CTRACE_SIM_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/time.h"
#include "ctrace/sim/rssi_model.h"

namespace ctrace::sim {

struct RadioConfig {
  double adv_interval_ms = 250.0;   // Ta
  double adv_jitter_max_ms = 10.0;
  double scan_interval_ms = 4096.0;  // Ts
  double scan_window_ms = 1024.0;    // ds
  double tx_duration_ms = 1.0;
  int channels = 3;
  double range_m = 30.0;

  absl::Status Validate() const;
};

struct Waypoint {
  double t_s = 0;
  double x = 0;
  double y = 0;
};

struct Position {
  double x = 0;
  double y = 0;
};

double Distance(const Position& a, const Position& b);

struct NodeSpec {
  std::string id;
  std::vector<Waypoint> path;  // strictly increasing t_s

  // Linear interpolation between waypoints; nullopt outside the path.
  std::optional<Position> PositionAt(double t_s) const;
  double present_from() const { return path.front().t_s; }
  double present_until() const { return path.back().t_s; }
};

// Node 'attacker' re-advertises the last TCN it received from 'victim'
// during [from_s, to_s).
struct ReplaySpec {
  std::string attacker;
  std::string victim;
  double from_s = 0;
  double to_s = 0;
};

struct Scenario {
  RadioConfig radio;
  RssiParams rssi;
  UtcTime start = MakeTime(MakeDate(2020, 4, 20), 9, 0, 0);
  double duration_s = 60;
  uint64_t seed = 1;
  std::vector<NodeSpec> nodes;
  std::vector<std::string> reporters;
  std::vector<std::string> second_order;
  std::vector<ReplaySpec> replays;

  // Index into nodes, or -1.
  int NodeIndex(std::string_view id) const;
};

// Text format, one statement per line, '#' starts a comment:
//   key = value          start, duration_s, seed, adv_interval_ms,
//                        adv_jitter_max_ms, scan_interval_ms, scan_window_ms,
//                        tx_duration_ms, range_m, rssi_p0, rssi_exponent,
//                        rssi_sigma
//   node ID t:x,y ...    waypoints, t in seconds from start
//   report ID            ID uploads its keys after the run
//   second_order ID      ID reports through proof of contact when notified
//   replay ATT VICTIM FROM TO
// Errors name the offending line.
absl::StatusOr<Scenario> ParseScenario(std::string_view text);
absl::StatusOr<Scenario> LoadScenario(const std::string& path);
std::string FormatScenario(const Scenario& scenario);

}  // namespace ctrace::sim

#endif  // CTRACE_SIM_SCENARIO_H_
