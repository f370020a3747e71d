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
#include "ctrace/server/server_log.h"

#include <filesystem>
#include <fstream>

namespace ctrace::server {

absl::StatusOr<std::unique_ptr<ServerLog>> ServerLog::Open(
    const std::string& path) {
  if (path.empty()) {
    return std::unique_ptr<ServerLog>(new ServerLog("", nullptr));
  }
  std::FILE* f = std::fopen(path.c_str(), "ab");
  if (f == nullptr) {
    return absl::UnavailableError("cannot open server log " + path);
  }
  return std::unique_ptr<ServerLog>(new ServerLog(path, f));
}

ServerLog::~ServerLog() {
  if (file_ != nullptr) std::fclose(file_);
}

absl::StatusOr<std::vector<nlohmann::json>> ServerLog::ReadAll(
    const std::string& path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::string content((std::istreambuf_iterator<char>(in)), {});
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    bool last = end == std::string::npos;
    std::string line = content.substr(pos, last ? std::string::npos : end - pos);
    pos = last ? content.size() : end + 1;
    ++line_no;
    if (line.empty()) continue;
    auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      if (last) break;
      return absl::DataLossError("server log " + path + " line " +
                                 std::to_string(line_no) + " is corrupt");
    }
    out.push_back(std::move(record));
  }
  return out;
}

absl::Status ServerLog::Append(const nlohmann::json& record) {
  if (file_ == nullptr) return absl::OkStatus();
  std::string line = record.dump() + "\n";
  std::lock_guard lock(mu_);
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() ||
      std::fflush(file_) != 0) {
    return absl::UnavailableError("write to server log failed");
  }
  return absl::OkStatus();
}

absl::Status ServerLog::Rewrite(const std::vector<nlohmann::json>& records) {
  if (file_ == nullptr) return absl::OkStatus();
  std::lock_guard lock(mu_);
  std::string tmp = path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto& r : records) out << r.dump() << '\n';
    if (!out.flush()) return absl::UnavailableError("cannot write " + tmp);
  }
  std::fclose(file_);
  file_ = nullptr;
  std::error_code ec;
  std::filesystem::rename(tmp, path_, ec);
  file_ = std::fopen(path_.c_str(), "ab");
  if (ec) return absl::UnavailableError("cannot replace server log: " + ec.message());
  if (file_ == nullptr) return absl::UnavailableError("cannot reopen server log");
  return absl::OkStatus();
}

}  // namespace ctrace::server
