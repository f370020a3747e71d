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
#ifndef CTRACE_SIM_SIMULATOR_H_
#define CTRACE_SIM_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/sim/scenario.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::sim {

inline constexpr int kFirstAdvChannel = 37;

enum class EventKind { kAdvTx = 0, kScanOpen = 1, kScanClose = 2, kRx = 3 };

struct RxRecord {
  int64_t tx_start_us = 0;
  int64_t time_us = 0;  // end of the packet, relative to scenario start
  int rx_node = 0;
  int tx_node = 0;
  tcn::TemporaryContactNumber tcn;
  uint64_t mac = 0;
  int rssi_dbm = 0;
  int channel = 0;
};

struct TxRecord {
  int node = 0;
  int channel = 0;
  int64_t start_us = 0;
  int64_t end_us = 0;
};

// What a passive observer sees change on the air for one node.
struct IdentityChange {
  int node = 0;
  int64_t time_us = 0;
  uint64_t mac = 0;
  tcn::TemporaryContactNumber tcn;
};

struct NodeStats {
  uint64_t tx_count = 0;  // single-channel transmissions
  int64_t scan_us = 0;
  int64_t present_us = 0;
  uint64_t rx_count = 0;
  uint64_t collision_losses = 0;
  uint64_t half_duplex_losses = 0;

  // Scan time plus transmit time over presence time.
  double RadioDuty(double tx_duration_ms) const;
};

struct SimTrace {
  UtcTime start;
  int64_t duration_us = 0;
  std::vector<std::string> node_ids;
  std::vector<TxRecord> tx;  // in transmission order
  std::vector<RxRecord> rx;  // in reception order
  std::vector<NodeStats> stats;
  std::vector<IdentityChange> identity_changes;
};

// TCN that node advertises at time t.
using TcnSource =
    std::function<tcn::TemporaryContactNumber(int node, UtcTime t)>;

// Fresh daily keys per node derived from seed; for runs that do not feed a
// protocol store.
TcnSource SeededTcnSource(uint64_t seed, size_t node_count);

// Runs the scenario's radio model to completion. Same scenario and TCN
// source give the same trace.
absl::StatusOr<SimTrace> RunScenario(const Scenario& scenario,
                                     const TcnSource& tcns);

}  // namespace ctrace::sim

#endif  // CTRACE_SIM_SIMULATOR_H_
