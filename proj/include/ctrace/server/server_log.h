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
#ifndef CTRACE_SERVER_SERVER_LOG_H_
#define CTRACE_SERVER_SERVER_LOG_H_

#include <cstdio>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace ctrace::server {

// Append-only JSON-lines file. Each Append is flushed before it returns.
// An empty path gives a log that keeps nothing.
class ServerLog {
 public:
  static absl::StatusOr<std::unique_ptr<ServerLog>> Open(
      const std::string& path);
  ~ServerLog();

  // Every record in the file, in order. A torn final line (crash during
  // append) is ignored; any other malformed line is an error.
  static absl::StatusOr<std::vector<nlohmann::json>> ReadAll(
      const std::string& path);

  absl::Status Append(const nlohmann::json& record);
  // Atomically replaces the file contents with records.
  absl::Status Rewrite(const std::vector<nlohmann::json>& records);

  const std::string& path() const { return path_; }
  bool persistent() const { return !path_.empty(); }

 private:
  explicit ServerLog(std::string path, std::FILE* file)
      : path_(std::move(path)), file_(file) {}

  std::string path_;
  std::mutex mu_;
  std::FILE* file_;
};

}  // namespace ctrace::server

#endif  // CTRACE_SERVER_SERVER_LOG_H_
