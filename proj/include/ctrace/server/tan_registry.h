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
#ifndef CTRACE_SERVER_TAN_REGISTRY_H_
#define CTRACE_SERVER_TAN_REGISTRY_H_

#include <chrono>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/common/time.h"

namespace ctrace::server {

enum class AuthorizationKind { kMedical, kSecondOrder };

std::string_view AuthorizationKindName(AuthorizationKind kind);
absl::StatusOr<AuthorizationKind> ParseAuthorizationKind(std::string_view name);

inline constexpr size_t kTanLength = 12;
inline constexpr std::chrono::hours kDefaultTanValidity{24};

struct UploadAuthorization {
  std::string tan;
  UtcTime issued_at;
  std::chrono::milliseconds validity = kDefaultTanValidity;
  bool consumed = false;
  AuthorizationKind kind = AuthorizationKind::kMedical;

  bool ExpiredAt(UtcTime now) const { return now >= issued_at + validity; }
};

class TanRegistry {
 public:
  explicit TanRegistry(
      std::chrono::milliseconds validity = kDefaultTanValidity)
      : validity_(validity) {}

  absl::StatusOr<UploadAuthorization> Issue(AuthorizationKind kind,
                                            UtcTime now, RandomSource& rng);
  // The authorization if it is known, unexpired and unconsumed.
  absl::StatusOr<UploadAuthorization> Check(const std::string& tan,
                                            UtcTime now) const;
  absl::Status Consume(const std::string& tan, UtcTime now);

  // Reload path; no validation.
  void Restore(const UploadAuthorization& auth);
  void MarkConsumed(const std::string& tan);
  size_t PurgeExpired(UtcTime now);
  std::vector<UploadAuthorization> All() const;

 private:
  absl::StatusOr<UploadAuthorization> CheckLocked(const std::string& tan,
                                                  UtcTime now) const;

  std::chrono::milliseconds validity_;
  mutable std::mutex mu_;
  std::map<std::string, UploadAuthorization> tans_;
};

}  // namespace ctrace::server

#endif  // CTRACE_SERVER_TAN_REGISTRY_H_
