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
#include "ctrace/sim/scenario.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"

namespace ctrace::sim {
namespace {

absl::Status LineError(size_t line, const std::string& what) {
  return absl::InvalidArgumentError("scenario line " + std::to_string(line) +
                                    ": " + what);
}

bool ParseDouble(std::string_view s, double* out) {
  return ParseNumber(s, out) && std::isfinite(*out);
}

absl::StatusOr<Waypoint> ParseWaypoint(std::string_view text) {
  size_t colon = text.find(':');
  size_t comma = text.find(',', colon == std::string_view::npos ? 0 : colon);
  Waypoint w;
  if (colon == std::string_view::npos || comma == std::string_view::npos ||
      !ParseDouble(text.substr(0, colon), &w.t_s) ||
      !ParseDouble(text.substr(colon + 1, comma - colon - 1), &w.x) ||
      !ParseDouble(text.substr(comma + 1), &w.y)) {
    return absl::InvalidArgumentError("bad waypoint '" + std::string(text) +
                                      "', expected t:x,y");
  }
  return w;
}

std::string Num(double v) {
  std::ostringstream out;
  out << std::setprecision(12) << v;
  return out.str();
}

}  // namespace

absl::Status RadioConfig::Validate() const {
  if (!(adv_interval_ms > 0)) {
    return absl::InvalidArgumentError("adv_interval_ms must be positive");
  }
  if (adv_jitter_max_ms < 0) {
    return absl::InvalidArgumentError("adv_jitter_max_ms must be >= 0");
  }
  if (!(scan_window_ms > 0) || scan_window_ms > scan_interval_ms) {
    return absl::InvalidArgumentError(
        "scan window must satisfy 0 < scan_window_ms <= scan_interval_ms");
  }
  if (!(tx_duration_ms > 0)) {
    return absl::InvalidArgumentError("tx_duration_ms must be positive");
  }
  if (channels < 1 || channels > 3) {
    return absl::InvalidArgumentError("channels must be 1..3");
  }
  if (!(range_m > 0)) return absl::InvalidArgumentError("range_m must be positive");
  return absl::OkStatus();
}

double Distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::optional<Position> NodeSpec::PositionAt(double t_s) const {
  if (path.empty() || t_s < path.front().t_s || t_s > path.back().t_s) {
    return std::nullopt;
  }
  for (size_t i = 1; i < path.size(); ++i) {
    const Waypoint& a = path[i - 1];
    const Waypoint& b = path[i];
    if (t_s <= b.t_s) {
      double f = (t_s - a.t_s) / (b.t_s - a.t_s);
      return Position{a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    }
  }
  return Position{path.back().x, path.back().y};
}

int Scenario::NodeIndex(std::string_view id) const {
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

absl::StatusOr<Scenario> ParseScenario(std::string_view text) {
  Scenario s;
  std::set<std::string> ids;
  struct Ref {
    size_t line;
    std::string id;
  };
  std::vector<Ref> refs;
  auto lines = SplitOn(text, '\n');
  for (size_t n = 0; n < lines.size(); ++n) {
    size_t line_no = n + 1;
    std::string_view line = lines[n];
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;

    if (size_t eq = line.find('='); eq != std::string_view::npos) {
      std::string key(Trim(line.substr(0, eq)));
      std::string_view value = Trim(line.substr(eq + 1));
      double v = 0;
      if (key == "start") {
        auto t = ParseIsoTimestamp(value);
        if (!t.ok()) return LineError(line_no, std::string(t.status().message()));
        s.start = *t;
        continue;
      }
      if (key == "seed") {
        if (!ParseNumber(value, &s.seed)) {
          return LineError(line_no, "seed must be an unsigned integer");
        }
        continue;
      }
      if (!ParseDouble(value, &v)) {
        return LineError(line_no, "value of '" + key + "' is not a number");
      }
      if (key == "duration_s") {
        if (!(v > 0)) return LineError(line_no, "duration_s must be positive");
        s.duration_s = v;
      } else if (key == "adv_interval_ms") {
        s.radio.adv_interval_ms = v;
      } else if (key == "adv_jitter_max_ms") {
        s.radio.adv_jitter_max_ms = v;
      } else if (key == "scan_interval_ms") {
        s.radio.scan_interval_ms = v;
      } else if (key == "scan_window_ms") {
        s.radio.scan_window_ms = v;
      } else if (key == "tx_duration_ms") {
        s.radio.tx_duration_ms = v;
      } else if (key == "channels") {
        s.radio.channels = static_cast<int>(v);
      } else if (key == "range_m") {
        s.radio.range_m = v;
      } else if (key == "rssi_p0") {
        s.rssi.p0_dbm = v;
      } else if (key == "rssi_exponent") {
        s.rssi.path_loss_exponent = v;
      } else if (key == "rssi_sigma") {
        if (v < 0) return LineError(line_no, "rssi_sigma must be >= 0");
        s.rssi.sigma_db = v;
      } else {
        return LineError(line_no, "unknown key '" + key + "'");
      }
      continue;
    }

    auto words = SplitWords(line);
    std::string verb(words[0]);
    if (verb == "node") {
      if (words.size() < 3) {
        return LineError(line_no, "node needs an id and at least one waypoint");
      }
      NodeSpec node{std::string(words[1]), {}};
      if (!ids.insert(node.id).second) {
        return LineError(line_no, "duplicate node '" + node.id + "'");
      }
      for (size_t i = 2; i < words.size(); ++i) {
        auto w = ParseWaypoint(words[i]);
        if (!w.ok()) return LineError(line_no, std::string(w.status().message()));
        if (!node.path.empty() && w->t_s <= node.path.back().t_s) {
          return LineError(line_no, "waypoint times must increase");
        }
        node.path.push_back(*w);
      }
      s.nodes.push_back(std::move(node));
    } else if (verb == "report" || verb == "second_order") {
      if (words.size() != 2) return LineError(line_no, verb + " takes one node id");
      std::string id(words[1]);
      (verb == "report" ? s.reporters : s.second_order).push_back(id);
      refs.push_back({line_no, id});
    } else if (verb == "replay") {
      ReplaySpec r;
      if (words.size() != 5 || !ParseDouble(words[3], &r.from_s) ||
          !ParseDouble(words[4], &r.to_s) || r.to_s <= r.from_s) {
        return LineError(line_no, "replay takes ATTACKER VICTIM FROM_S TO_S");
      }
      r.attacker = std::string(words[1]);
      r.victim = std::string(words[2]);
      refs.push_back({line_no, r.attacker});
      refs.push_back({line_no, r.victim});
      s.replays.push_back(r);
    } else {
      return LineError(line_no, "unknown statement '" + verb + "'");
    }
  }
  for (const auto& ref : refs) {
    if (!ids.contains(ref.id)) {
      return LineError(ref.line, "unknown node '" + ref.id + "'");
    }
  }
  if (auto st = s.radio.Validate(); !st.ok()) {
    return absl::InvalidArgumentError("scenario: " + std::string(st.message()));
  }
  return s;
}

absl::StatusOr<Scenario> LoadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError("cannot read scenario " + path);
  std::string text((std::istreambuf_iterator<char>(in)), {});
  auto s = ParseScenario(text);
  if (!s.ok()) {
    return absl::Status(s.status().code(), path + ": " + std::string(s.status().message()));
  }
  return s;
}

std::string FormatScenario(const Scenario& s) {
  std::ostringstream out;
  out << "start = " << FormatIsoTimestamp(s.start) << "\n"
      << "duration_s = " << Num(s.duration_s) << "\n"
      << "seed = " << s.seed << "\n"
      << "adv_interval_ms = " << Num(s.radio.adv_interval_ms) << "\n"
      << "adv_jitter_max_ms = " << Num(s.radio.adv_jitter_max_ms) << "\n"
      << "scan_interval_ms = " << Num(s.radio.scan_interval_ms) << "\n"
      << "scan_window_ms = " << Num(s.radio.scan_window_ms) << "\n"
      << "tx_duration_ms = " << Num(s.radio.tx_duration_ms) << "\n"
      << "channels = " << s.radio.channels << "\n"
      << "range_m = " << Num(s.radio.range_m) << "\n"
      << "rssi_p0 = " << Num(s.rssi.p0_dbm) << "\n"
      << "rssi_exponent = " << Num(s.rssi.path_loss_exponent) << "\n"
      << "rssi_sigma = " << Num(s.rssi.sigma_db) << "\n";
  for (const auto& n : s.nodes) {
    out << "node " << n.id;
    for (const auto& w : n.path) {
      out << " " << Num(w.t_s) << ":" << Num(w.x) << "," << Num(w.y);
    }
    out << "\n";
  }
  for (const auto& id : s.reporters) out << "report " << id << "\n";
  for (const auto& id : s.second_order) out << "second_order " << id << "\n";
  for (const auto& r : s.replays) {
    out << "replay " << r.attacker << " " << r.victim << " " << Num(r.from_s)
        << " " << Num(r.to_s) << "\n";
  }
  return out.str();
}

}  // namespace ctrace::sim
