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
#include "ctrace/tcn/tcn.h"

#include <cstring>

namespace ctrace::tcn {

absl::StatusOr<TimeIntervalNumber> TimeIntervalNumber::Create(int value) {
  if (value < 0 || value >= kIntervalsPerDay) {
    return absl::OutOfRangeError("time interval number " +
                                 std::to_string(value) + " outside [0, 143]");
  }
  return TimeIntervalNumber(value);
}

UtcTime TimeIntervalNumber::StartOn(Date date) const {
  return UtcTime(date) + std::chrono::seconds(value_ * kIntervalSeconds);
}

TimeIntervalNumber TinOf(UtcTime timestamp) {
  auto since_midnight = timestamp - UtcTime(DateOf(timestamp));
  auto seconds =
      std::chrono::duration_cast<std::chrono::seconds>(since_midnight).count();
  return TimeIntervalNumber::FromValidated(
      static_cast<int>(seconds / kIntervalSeconds));
}

absl::StatusOr<TemporaryContactNumber> TemporaryContactNumber::FromHex(
    std::string_view hex) {
  auto bytes = HexDecodeFixed<kTcnSize>(hex);
  if (!bytes.ok()) return bytes.status();
  TemporaryContactNumber out;
  out.bytes = *bytes;
  return out;
}

absl::StatusOr<ContactEventTcn> ContactEventTcn::FromHex(std::string_view hex) {
  auto bytes = HexDecodeFixed<kContactEventTcnSize>(hex);
  if (!bytes.ok()) return bytes.status();
  ContactEventTcn out;
  out.bytes = *bytes;
  return out;
}

absl::StatusOr<DailyKey> GenerateDailyKey(Date date, RandomSource& rng) {
  std::array<uint8_t, kDailyKeySize> bytes{};
  absl::Status status = rng.Fill(bytes);
  if (!status.ok()) {
    SecureWipe(bytes);
    return absl::InternalError("daily key generation failed: " +
                               std::string(status.message()));
  }
  DailyKey key(date, bytes);
  SecureWipe(bytes);
  return key;
}

TemporaryContactNumber DeriveTcn(const DailyKey& key, TimeIntervalNumber tin) {
  std::array<uint8_t, sizeof(kTcnLabel) - 1 + 2> message{};
  std::memcpy(message.data(), kTcnLabel, sizeof(kTcnLabel) - 1);
  auto encoded = tin.Encode();
  message[sizeof(kTcnLabel) - 1] = encoded[0];
  message[sizeof(kTcnLabel)] = encoded[1];
  auto mac = HmacSha256(key.bytes(), message);
  TemporaryContactNumber tcn;
  std::memcpy(tcn.bytes.data(), mac.data(), kTcnSize);
  return tcn;
}

ContactEventTcn ComputeContactEventTcn(const TemporaryContactNumber& tcn,
                                       Date date, TimeIntervalNumber tin) {
  std::string iso = FormatIsoDate(date);
  auto encoded = tin.Encode();
  ContactEventTcn out;
  out.bytes = Sha256({tcn.span(), AsBytes(iso), encoded});
  return out;
}

std::vector<IntervalTcns> RegenerateDayTcns(const DailyKey& key) {
  std::vector<IntervalTcns> out;
  out.reserve(kIntervalsPerDay);
  for (int t = 0; t < kIntervalsPerDay; ++t) {
    auto tin = TimeIntervalNumber::FromValidated(t);
    auto tcn = DeriveTcn(key, tin);
    out.push_back({tin, tcn, ComputeContactEventTcn(tcn, key.date(), tin)});
  }
  return out;
}

}  // namespace ctrace::tcn
