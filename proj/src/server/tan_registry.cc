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
#include "ctrace/server/tan_registry.h"

namespace ctrace::server {
namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";

}  // namespace

std::string_view AuthorizationKindName(AuthorizationKind kind) {
  return kind == AuthorizationKind::kMedical ? "MEDICAL" : "SECOND_ORDER";
}

absl::StatusOr<AuthorizationKind> ParseAuthorizationKind(std::string_view name) {
  if (name == "MEDICAL") return AuthorizationKind::kMedical;
  if (name == "SECOND_ORDER") return AuthorizationKind::kSecondOrder;
  return absl::InvalidArgumentError("unknown authorization kind: " +
                                    std::string(name));
}

absl::StatusOr<UploadAuthorization> TanRegistry::Issue(AuthorizationKind kind,
                                                       UtcTime now,
                                                       RandomSource& rng) {
  std::lock_guard lock(mu_);
  for (int attempt = 0; attempt < 8; ++attempt) {
    std::string tan(kTanLength, ' ');
    for (char& c : tan) {
      uint8_t b = 0;
      // Rejection sampling keeps every symbol equally likely.
      do {
        if (auto s = rng.Fill({&b, 1}); !s.ok()) {
          return absl::InternalError("cannot draw TAN: " +
                                     std::string(s.message()));
        }
      } while (b >= 248);
      c = kAlphabet[b % kAlphabet.size()];
    }
    if (tans_.contains(tan)) continue;
    UploadAuthorization auth{tan, now, validity_, false, kind};
    tans_.emplace(tan, auth);
    return auth;
  }
  return absl::InternalError("TAN space exhausted");
}

absl::StatusOr<UploadAuthorization> TanRegistry::CheckLocked(
    const std::string& tan, UtcTime now) const {
  auto it = tans_.find(tan);
  if (it == tans_.end()) return absl::UnauthenticatedError("unknown TAN");
  if (it->second.consumed) {
    return absl::UnauthenticatedError("TAN already used");
  }
  if (it->second.ExpiredAt(now)) {
    return absl::UnauthenticatedError("TAN expired");
  }
  return it->second;
}

absl::StatusOr<UploadAuthorization> TanRegistry::Check(const std::string& tan,
                                                       UtcTime now) const {
  std::lock_guard lock(mu_);
  return CheckLocked(tan, now);
}

absl::Status TanRegistry::Consume(const std::string& tan, UtcTime now) {
  std::lock_guard lock(mu_);
  auto auth = CheckLocked(tan, now);
  if (!auth.ok()) return auth.status();
  tans_[tan].consumed = true;
  return absl::OkStatus();
}

void TanRegistry::Restore(const UploadAuthorization& auth) {
  std::lock_guard lock(mu_);
  tans_.insert_or_assign(auth.tan, auth);
}

void TanRegistry::MarkConsumed(const std::string& tan) {
  std::lock_guard lock(mu_);
  auto it = tans_.find(tan);
  if (it != tans_.end()) it->second.consumed = true;
}

size_t TanRegistry::PurgeExpired(UtcTime now) {
  std::lock_guard lock(mu_);
  return std::erase_if(tans_,
                       [now](const auto& kv) { return kv.second.ExpiredAt(now); });
}

std::vector<UploadAuthorization> TanRegistry::All() const {
  std::lock_guard lock(mu_);
  std::vector<UploadAuthorization> out;
  for (const auto& [tan, auth] : tans_) out.push_back(auth);
  return out;
}

}  // namespace ctrace::server
