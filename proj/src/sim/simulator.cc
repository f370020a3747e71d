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
#include "ctrace/sim/simulator.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <tuple>

#include "ctrace/common/status_macros.h"
#include "ctrace/sim/rssi_model.h"

namespace ctrace::sim {
namespace {

using tcn::TemporaryContactNumber;

constexpr double kMinRssiDistanceM = 0.1;

int64_t Us(double ms) { return static_cast<int64_t>(std::llround(ms * 1000.0)); }

struct Event {
  int64_t time_us;
  EventKind kind;
  int node;
  uint64_t seq;
  // kAdvTx: channel slot within the advertising event.
  // kScanOpen/kScanClose: scan window index.
  // kRx: index into the transmission log.
  int64_t arg;

  // Min-heap order: time, then kind, then node, then insertion.
  bool operator>(const Event& o) const {
    return std::tie(time_us, kind, node, seq) >
           std::tie(o.time_us, o.kind, o.node, o.seq);
  }
};

struct Transmission {
  int node;
  int channel;
  int64_t start_us;
  int64_t end_us;
  TemporaryContactNumber tcn;
  uint64_t mac;
};

struct NodeState {
  std::unique_ptr<SeededRandom> rng;
  int64_t from_us = 0;
  int64_t until_us = 0;
  int64_t scan_phase_us = 0;
  int first_channel = 0;
  int64_t adv_event_start_us = 0;
  // Open scan window, if any.
  bool scanning = false;
  int scan_channel = 0;
  int64_t scan_end_us = 0;
  // Current on-air identity.
  std::optional<TemporaryContactNumber> own_tcn;
  uint64_t mac = 0;
  // Replay state.
  std::optional<TemporaryContactNumber> captured;
};

class Run {
 public:
  Run(const Scenario& s, const TcnSource& tcns)
      : s_(s), tcns_(tcns), rssi_rng_(DeriveSeed(s.seed, 1)),
        mac_rng_(DeriveSeed(s.seed, 2)) {}

  SimTrace Execute();

 private:
  void Push(int64_t t, EventKind kind, int node, int64_t arg) {
    if (t < 0 || t >= duration_us_) return;
    queue_.push({t, kind, node, seq_++, arg});
  }
  std::optional<Position> PositionAt(int node, int64_t t_us) const {
    return s_.nodes[node].PositionAt(static_cast<double>(t_us) / 1e6);
  }
  int64_t WindowStart(int node, int64_t k) const {
    const NodeState& n = nodes_[node];
    return n.from_us + n.scan_phase_us + (k - 1) * Us(s_.radio.scan_interval_ms);
  }
  int ChannelOfWindow(int node, int64_t k) const {
    return kFirstAdvChannel + static_cast<int>((nodes_[node].first_channel + k) %
                                               s_.radio.channels);
  }
  const ReplaySpec* ActiveReplay(int node, int64_t t_us) const;
  TemporaryContactNumber Payload(int node, int64_t t_us, uint64_t* mac);

  void OnAdv(const Event& e);
  void OnScanOpen(const Event& e);
  void OnScanClose(const Event& e);
  void OnRx(const Event& e);

  const Scenario& s_;
  const TcnSource& tcns_;
  SeededRandom rssi_rng_;
  SeededRandom mac_rng_;
  int64_t duration_us_ = 0;
  uint64_t seq_ = 0;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::vector<NodeState> nodes_;
  std::vector<Transmission> tx_log_;
  size_t tx_live_from_ = 0;  // earlier entries cannot overlap anything pending
  SimTrace trace_;
};

const ReplaySpec* Run::ActiveReplay(int node, int64_t t_us) const {
  for (const auto& r : s_.replays) {
    if (s_.NodeIndex(r.attacker) == node && t_us >= Us(r.from_s * 1000) &&
        t_us < Us(r.to_s * 1000)) {
      return &r;
    }
  }
  return nullptr;
}

TemporaryContactNumber Run::Payload(int node, int64_t t_us, uint64_t* mac) {
  NodeState& n = nodes_[node];
  const ReplaySpec* replay = ActiveReplay(node, t_us);
  if (replay != nullptr && n.captured.has_value()) {
    *mac = n.mac;
    return *n.captured;
  }
  UtcTime now = s_.start + std::chrono::milliseconds(t_us / 1000);
  TemporaryContactNumber tcn = tcns_(node, now);
  if (!n.own_tcn.has_value() || *n.own_tcn != tcn) {
    // The address changes together with the TCN.
    n.own_tcn = tcn;
    n.mac = mac_rng_() & 0xFFFFFFFFFFFFull;
    trace_.identity_changes.push_back({node, t_us, n.mac, tcn});
  }
  *mac = n.mac;
  return tcn;
}

void Run::OnAdv(const Event& e) {
  int node = e.node;
  NodeState& n = nodes_[node];
  int slot = static_cast<int>(e.arg);
  int64_t tx_us = Us(s_.radio.tx_duration_ms);
  if (slot == 0) {
    n.adv_event_start_us = e.time_us;
    double jitter = n.rng->UniformDouble() * s_.radio.adv_jitter_max_ms;
    int64_t next = e.time_us + Us(s_.radio.adv_interval_ms) + Us(jitter);
    if (next <= n.until_us) Push(next, EventKind::kAdvTx, node, 0);
  }
  if (slot + 1 < s_.radio.channels) {
    Push(e.time_us + tx_us, EventKind::kAdvTx, node, slot + 1);
  }
  auto pos = PositionAt(node, e.time_us);
  if (!pos.has_value()) return;

  Transmission tx{node, kFirstAdvChannel + slot, e.time_us, e.time_us + tx_us, {}, 0};
  tx.tcn = Payload(node, e.time_us, &tx.mac);
  tx_log_.push_back(tx);
  trace_.tx.push_back({node, tx.channel, tx.start_us, tx.end_us});
  ++trace_.stats[node].tx_count;
  int64_t index = static_cast<int64_t>(tx_log_.size() - 1);

  for (int r = 0; r < static_cast<int>(nodes_.size()); ++r) {
    if (r == node) continue;
    const NodeState& rn = nodes_[r];
    if (!rn.scanning || rn.scan_channel != tx.channel || rn.scan_end_us < tx.end_us) {
      continue;
    }
    auto rpos = PositionAt(r, e.time_us);
    if (!rpos.has_value() || Distance(*pos, *rpos) > s_.radio.range_m) continue;
    Push(tx.end_us, EventKind::kRx, r, index);
  }
}

void Run::OnScanOpen(const Event& e) {
  NodeState& n = nodes_[e.node];
  int64_t k = e.arg;
  int64_t end = std::min({WindowStart(e.node, k) + Us(s_.radio.scan_window_ms),
                          n.until_us, duration_us_});
  n.scanning = true;
  n.scan_channel = ChannelOfWindow(e.node, k);
  n.scan_end_us = end;
  trace_.stats[e.node].scan_us += end - e.time_us;
  // Close events at the window end are ordered before an open at the same
  // instant only by kind; windows never touch because ds <= Ts.
  Push(end, EventKind::kScanClose, e.node, k);
  int64_t next = WindowStart(e.node, k + 1);
  if (next <= n.until_us) Push(next, EventKind::kScanOpen, e.node, k + 1);
}

void Run::OnScanClose(const Event& e) {
  NodeState& n = nodes_[e.node];
  if (n.scan_end_us == e.time_us) n.scanning = false;
}

void Run::OnRx(const Event& e) {
  const Transmission& tx = tx_log_[e.arg];
  int r = e.node;
  NodeStats& stats = trace_.stats[r];
  auto rpos = PositionAt(r, tx.start_us);
  if (!rpos.has_value()) return;
  for (size_t i = tx_live_from_; i < tx_log_.size(); ++i) {
    if (static_cast<int64_t>(i) == e.arg) continue;
    const Transmission& other = tx_log_[i];
    if (other.end_us <= tx.start_us || other.start_us >= tx.end_us) continue;
    if (other.node == r) {
      ++stats.half_duplex_losses;
      return;
    }
    if (other.channel != tx.channel) continue;
    auto opos = PositionAt(other.node, other.start_us);
    if (opos.has_value() && Distance(*opos, *rpos) <= s_.radio.range_m) {
      ++stats.collision_losses;
      return;
    }
  }
  auto tpos = PositionAt(tx.node, tx.start_us);
  double d = std::max(kMinRssiDistanceM, Distance(*tpos, *rpos));
  int rssi = ModelRssi(d, rssi_rng_, s_.rssi).value_or(s_.rssi.min_dbm);
  trace_.rx.push_back({tx.start_us, e.time_us, r, tx.node, tx.tcn, tx.mac, rssi,
                       tx.channel});
  ++stats.rx_count;
  // A replaying attacker keeps the most recent TCN heard from its victim.
  for (const auto& replay : s_.replays) {
    if (s_.NodeIndex(replay.attacker) == r && s_.NodeIndex(replay.victim) == tx.node &&
        !ActiveReplay(r, e.time_us)) {
      nodes_[r].captured = tx.tcn;
    }
  }
}

SimTrace Run::Execute() {
  duration_us_ = Us(s_.duration_s * 1000.0);
  trace_.start = s_.start;
  trace_.duration_us = duration_us_;
  trace_.stats.resize(s_.nodes.size());
  nodes_.resize(s_.nodes.size());
  for (size_t i = 0; i < s_.nodes.size(); ++i) {
    const NodeSpec& spec = s_.nodes[i];
    trace_.node_ids.push_back(spec.id);
    NodeState& n = nodes_[i];
    n.rng = std::make_unique<SeededRandom>(DeriveSeed(s_.seed, 100 + i));
    n.from_us = std::max<int64_t>(0, Us(spec.present_from() * 1000));
    n.until_us = std::min(duration_us_, Us(spec.present_until() * 1000));
    if (n.until_us <= n.from_us) continue;
    trace_.stats[i].present_us = n.until_us - n.from_us;
    n.scan_phase_us = static_cast<int64_t>(
        n.rng->Uniform(static_cast<uint64_t>(Us(s_.radio.scan_interval_ms))));
    n.first_channel = static_cast<int>(n.rng->Uniform(s_.radio.channels));
    int64_t first_adv = n.from_us + static_cast<int64_t>(n.rng->Uniform(
                                        static_cast<uint64_t>(Us(s_.radio.adv_interval_ms))));
    if (first_adv <= n.until_us) Push(first_adv, EventKind::kAdvTx, i, 0);
    // Window 0 may already be open when the node appears.
    int64_t w0 = WindowStart(i, 0);
    if (w0 + Us(s_.radio.scan_window_ms) > n.from_us) {
      Push(n.from_us, EventKind::kScanOpen, i, 0);
    } else {
      Push(WindowStart(i, 1), EventKind::kScanOpen, i, 1);
    }
  }

  const int64_t horizon = 4 * Us(s_.radio.tx_duration_ms);
  while (!queue_.empty()) {
    Event e = queue_.top();
    queue_.pop();
    switch (e.kind) {
      case EventKind::kAdvTx:
        OnAdv(e);
        break;
      case EventKind::kScanOpen:
        OnScanOpen(e);
        break;
      case EventKind::kScanClose:
        OnScanClose(e);
        break;
      case EventKind::kRx:
        OnRx(e);
        break;
    }
    while (tx_live_from_ < tx_log_.size() &&
           tx_log_[tx_live_from_].end_us + horizon < e.time_us) {
      ++tx_live_from_;
    }
  }
  return std::move(trace_);
}

}  // namespace

double NodeStats::RadioDuty(double tx_duration_ms) const {
  if (present_us <= 0) return 0.0;
  double tx_us = static_cast<double>(tx_count) * tx_duration_ms * 1000.0;
  return (static_cast<double>(scan_us) + tx_us) / static_cast<double>(present_us);
}

TcnSource SeededTcnSource(uint64_t seed, size_t node_count) {
  struct Keys {
    uint64_t seed;
    std::map<std::pair<int, Date>, tcn::DailyKey> keys;
  };
  auto state = std::make_shared<Keys>();
  state->seed = seed;
  (void)node_count;
  return [state](int node, UtcTime t) {
    Date d = DateOf(t);
    auto key = std::make_pair(node, d);
    auto it = state->keys.find(key);
    if (it == state->keys.end()) {
      SeededRandom rng(DeriveSeed(state->seed ^ static_cast<uint64_t>(
                                                    d.time_since_epoch().count()),
                                  static_cast<uint64_t>(node)));
      it = state->keys.emplace(key, *tcn::GenerateDailyKey(d, rng)).first;
    }
    return tcn::DeriveTcn(it->second, tcn::TinOf(t));
  };
}

absl::StatusOr<SimTrace> RunScenario(const Scenario& scenario,
                                     const TcnSource& tcns) {
  RETURN_IF_ERROR(scenario.radio.Validate());
  if (!(scenario.duration_s > 0)) {
    return absl::InvalidArgumentError("duration must be positive");
  }
  for (const auto& n : scenario.nodes) {
    if (n.path.empty()) {
      return absl::InvalidArgumentError("node " + n.id + " has no waypoints");
    }
  }
  Run run(scenario, tcns);
  return run.Execute();
}

}  // namespace ctrace::sim
