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
// Derivation of temporary contact numbers (TCNs) and contact-event TCNs.
//
// A device draws a fresh random 32-byte key every day. During each
// ten-minute interval of the day it advertises
//
//   tcn = first16(HMAC-SHA256(key, "CT-RPI" || u16be(interval)))
//
// and an observer binds every received TCN to the date and interval it was
// seen in:
//
//   ce_tcn = SHA-256(tcn || "YYYY-MM-DD" || u16be(interval))
//
// The interval binding is what makes a replayed TCN useless outside the
// interval it was captured in.

#ifndef CTRACE_TCN_TCN_H_
#define CTRACE_TCN_TCN_H_

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/bytes.h"
#include "ctrace/common/random.h"
#include "ctrace/common/time.h"

namespace ctrace::tcn {

inline constexpr int kIntervalsPerDay = 144;
inline constexpr int kIntervalSeconds = 600;
inline constexpr size_t kDailyKeySize = 32;
inline constexpr size_t kTcnSize = 16;
inline constexpr size_t kContactEventTcnSize = 32;
inline constexpr char kTcnLabel[] = "CT-RPI";

// Index of a ten-minute window within a UTC day, 0..143.
class TimeIntervalNumber {
 public:
  static absl::StatusOr<TimeIntervalNumber> Create(int value);
  // Caller guarantees 0 <= value < kIntervalsPerDay.
  static constexpr TimeIntervalNumber FromValidated(int value) {
    return TimeIntervalNumber(value);
  }

  int value() const { return value_; }
  std::array<uint8_t, 2> Encode() const {
    return {static_cast<uint8_t>(value_ >> 8), static_cast<uint8_t>(value_)};
  }
  // Start of this interval on the given date.
  UtcTime StartOn(Date date) const;

  auto operator<=>(const TimeIntervalNumber&) const = default;

 private:
  constexpr explicit TimeIntervalNumber(int value) : value_(value) {}
  int value_;
};

TimeIntervalNumber TinOf(UtcTime timestamp);

template <size_t N>
struct FixedBytes {
  std::array<uint8_t, N> bytes{};

  std::string Hex() const { return HexEncode(bytes); }
  std::span<const uint8_t> span() const { return bytes; }
  auto operator<=>(const FixedBytes&) const = default;
};

struct TemporaryContactNumber : FixedBytes<kTcnSize> {
  static absl::StatusOr<TemporaryContactNumber> FromHex(std::string_view hex);
};

struct ContactEventTcn : FixedBytes<kContactEventTcnSize> {
  static absl::StatusOr<ContactEventTcn> FromHex(std::string_view hex);
};

// Per-device, per-day secret. Wiped on destruction.
class DailyKey {
 public:
  DailyKey(Date date, const std::array<uint8_t, kDailyKeySize>& bytes)
      : date_(date), bytes_(bytes) {}
  DailyKey(const DailyKey&) = default;
  DailyKey& operator=(const DailyKey&) = default;
  ~DailyKey() { SecureWipe(bytes_); }

  Date date() const { return date_; }
  const std::array<uint8_t, kDailyKeySize>& bytes() const { return bytes_; }
  std::string Hex() const { return HexEncode(bytes_); }

  bool operator==(const DailyKey& other) const = default;

 private:
  Date date_;
  std::array<uint8_t, kDailyKeySize> bytes_;
};

// Draws 32 fresh bytes from rng. Never reads any previously issued key.
absl::StatusOr<DailyKey> GenerateDailyKey(Date date, RandomSource& rng);

TemporaryContactNumber DeriveTcn(const DailyKey& key, TimeIntervalNumber tin);

ContactEventTcn ComputeContactEventTcn(const TemporaryContactNumber& tcn,
                                       Date date, TimeIntervalNumber tin);

struct IntervalTcns {
  TimeIntervalNumber tin;
  TemporaryContactNumber tcn;
  ContactEventTcn ce_tcn;
};

// All 144 (tin, tcn, ce_tcn) triples of the key's day, in interval order.
std::vector<IntervalTcns> RegenerateDayTcns(const DailyKey& key);

}  // namespace ctrace::tcn

#endif  // CTRACE_TCN_TCN_H_
