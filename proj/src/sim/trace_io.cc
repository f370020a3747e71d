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
#include "ctrace/sim/trace_io.h"

#include <cstdio>
#include <sstream>

#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"

namespace ctrace::sim {
namespace {

constexpr char kHeader[] = "# ctrace-trace v1";
constexpr std::string_view kStartPrefix = "# start=";

std::string FormatMillis(int64_t us) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%03lld",
                static_cast<long long>(us / 1000),
                static_cast<long long>(us % 1000));
  return buf;
}

absl::StatusOr<int64_t> ParseMillis(std::string_view text) {
  auto parts = SplitOn(text, '.');
  int64_t whole = 0, frac = 0;
  if (parts.size() > 2 || !ParseNumber(parts[0], &whole) || whole < 0) {
    return absl::InvalidArgumentError("bad time '" + std::string(text) + "'");
  }
  if (parts.size() == 2) {
    if (parts[1].size() != 3 || !ParseNumber(parts[1], &frac) || frac < 0) {
      return absl::InvalidArgumentError("bad time '" + std::string(text) + "'");
    }
  }
  return whole * 1000 + frac;
}

}  // namespace

std::string FormatTrace(const SimTrace& trace) {
  std::ostringstream out;
  out << kHeader << "\n" << kStartPrefix << FormatIsoTimestamp(trace.start)
      << "\n";
  for (const auto& r : trace.rx) {
    out << FormatMillis(r.time_us) << '\t' << trace.node_ids[r.rx_node] << '\t'
        << trace.node_ids[r.tx_node] << '\t' << r.tcn.Hex() << '\t'
        << r.rssi_dbm << '\t' << r.channel << '\n';
  }
  return out.str();
}

absl::StatusOr<ParsedTrace> ParseTrace(std::string_view text) {
  ParsedTrace parsed;
  bool have_start = false;
  int line_no = 0;
  for (std::string_view line : SplitOn(text, '\n')) {
    ++line_no;
    line = Trim(line);
    if (line.empty()) continue;
    if (line.substr(0, kStartPrefix.size()) == kStartPrefix) {
      ASSIGN_OR_RETURN(parsed.start,
                       ParseIsoTimestamp(line.substr(kStartPrefix.size())));
      have_start = true;
      continue;
    }
    if (line[0] == '#') continue;
    auto error = [&](const std::string& what) {
      return absl::InvalidArgumentError("trace line " + std::to_string(line_no) +
                                        ": " + what);
    };
    if (!have_start) return error("record before start header");
    auto fields = SplitOn(line, '\t');
    if (fields.size() != 6) return error("expected 6 tab-separated fields");
    TraceRecord r;
    auto time = ParseMillis(fields[0]);
    if (!time.ok()) return error(std::string(time.status().message()));
    r.time_us = *time;
    r.rx = std::string(fields[1]);
    r.tx = std::string(fields[2]);
    auto tcn = tcn::TemporaryContactNumber::FromHex(fields[3]);
    if (!tcn.ok()) return error(std::string(tcn.status().message()));
    r.tcn = *tcn;
    if (!ParseNumber(fields[4], &r.rssi_dbm)) return error("bad rssi");
    if (!ParseNumber(fields[5], &r.channel)) return error("bad channel");
    parsed.records.push_back(std::move(r));
  }
  if (!have_start) return absl::InvalidArgumentError("trace has no start header");
  return parsed;
}

absl::Status ApplyToStores(
    const ParsedTrace& trace,
    const std::map<std::string, store::EncounterStore*>& stores) {
  for (const auto& r : trace.records) {
    auto it = stores.find(r.rx);
    if (it == stores.end()) continue;
    auto recorded = it->second->RecordSighting(r.tcn, r.AbsoluteTime(trace.start),
                                               r.rssi_dbm);
    if (!recorded.ok()) return recorded.status();
  }
  return absl::OkStatus();
}

}  // namespace ctrace::sim
