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
#ifndef CTRACE_HARNESS_SERVER_CONFIG_H_
#define CTRACE_HARNESS_SERVER_CONFIG_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "ctrace/server/tracing_server.h"

namespace ctrace::harness {

// key = value lines, '#' comments. Keys: window_days, min_query,
// psi_sessions_per_day (0 disables the limit), batch_period_s,
// tan_validity_s, bloom_hash_count, exact_filters (true/false), log_path,
// medical_credential (repeatable).
absl::StatusOr<server::ServerConfig> ParseServerConfig(std::string_view text);
absl::StatusOr<server::ServerConfig> LoadServerConfig(const std::string& path);

absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_SERVER_CONFIG_H_
