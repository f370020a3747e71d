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
#include "ctrace/harness/server_config.h"

#include <fstream>
#include <sstream>

#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"

namespace ctrace::harness {

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

absl::StatusOr<server::ServerConfig> ParseServerConfig(std::string_view text) {
  server::ServerConfig config;
  auto lines = SplitOn(text, '\n');
  for (size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    if (size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    auto error = [&](const std::string& what) {
      return absl::InvalidArgumentError("config line " + std::to_string(n + 1) +
                                        ": " + what);
    };
    size_t eq = line.find('=');
    if (eq == std::string_view::npos) return error("expected key = value");
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    int64_t number = 0;
    bool numeric = ParseNumber(value, &number) && number >= 0;
    if (key == "medical_credential") {
      if (value.empty()) return error("empty credential");
      config.medical_credentials.push_back(value);
    } else if (key == "log_path") {
      config.log_path = value;
    } else if (key == "exact_filters") {
      if (value != "true" && value != "false") return error("exact_filters is true or false");
      config.exact_filters = value == "true";
    } else if (!numeric) {
      return error("value of '" + key + "' must be a non-negative integer");
    } else if (key == "window_days") {
      if (number < 1) return error("window_days must be at least 1");
      config.window_days = static_cast<int>(number);
    } else if (key == "min_query") {
      config.min_query = static_cast<size_t>(number);
    } else if (key == "psi_sessions_per_day") {
      config.psi_sessions_per_window = static_cast<int>(number);
    } else if (key == "batch_period_s") {
      if (number < 1) return error("batch_period_s must be positive");
      config.batch_period = std::chrono::seconds(number);
    } else if (key == "tan_validity_s") {
      config.tan_validity = std::chrono::seconds(number);
    } else if (key == "bloom_hash_count") {
      if (number < 1 || number > 64) return error("bloom_hash_count must be 1..64");
      config.bloom_hash_count = static_cast<int>(number);
    } else {
      return error("unknown key '" + key + "'");
    }
  }
  return config;
}

absl::StatusOr<server::ServerConfig> LoadServerConfig(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, ReadFile(path));
  return ParseServerConfig(text);
}

}  // namespace ctrace::harness
