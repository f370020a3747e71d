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
#ifndef CTRACE_SIM_TRACE_IO_H_
#define CTRACE_SIM_TRACE_IO_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/time.h"
#include "ctrace/sim/simulator.h"
#include "ctrace/store/encounter_store.h"

namespace ctrace::sim {

// One decoded advertisement as written to a trace file:
//   time_ms <TAB> rx <TAB> tx <TAB> tcn_hex <TAB> rssi <TAB> channel
// time_ms is relative to the "# start=" header and has three decimals.
struct TraceRecord {
  int64_t time_us = 0;
  std::string rx;
  std::string tx;
  tcn::TemporaryContactNumber tcn;
  int rssi_dbm = 0;
  int channel = 0;

  UtcTime AbsoluteTime(UtcTime start) const {
    return start + std::chrono::milliseconds(time_us / 1000);
  }
};

struct ParsedTrace {
  UtcTime start;
  std::vector<TraceRecord> records;
};

std::string FormatTrace(const SimTrace& trace);
absl::StatusOr<ParsedTrace> ParseTrace(std::string_view text);

// Feeds each record into the receiver's store. Receivers missing from the
// map are skipped.
absl::Status ApplyToStores(
    const ParsedTrace& trace,
    const std::map<std::string, store::EncounterStore*>& stores);

}  // namespace ctrace::sim

#endif  // CTRACE_SIM_TRACE_IO_H_
