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
#ifndef CTRACE_COMMON_TIME_H_
#define CTRACE_COMMON_TIME_H_

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace ctrace {

// All protocol times are UTC with millisecond resolution.
using UtcTime = std::chrono::sys_time<std::chrono::milliseconds>;
using Date = std::chrono::sys_days;
using Clock = std::function<UtcTime()>;

inline Date DateOf(UtcTime t) {
  return std::chrono::floor<std::chrono::days>(t);
}

// "YYYY-MM-DD".
std::string FormatIsoDate(Date date);
// "YYYY-MM-DDTHH:MM:SS.mmmZ".
std::string FormatIsoTimestamp(UtcTime t);

absl::StatusOr<Date> ParseIsoDate(std::string_view text);
// Accepts an optional fractional part of up to three digits and requires the
// trailing 'Z'.
absl::StatusOr<UtcTime> ParseIsoTimestamp(std::string_view text);

inline Date MakeDate(int y, unsigned m, unsigned d) {
  return std::chrono::sys_days(std::chrono::year(y) / std::chrono::month(m) /
                               std::chrono::day(d));
}

inline UtcTime MakeTime(Date date, int hours, int minutes, int seconds,
                        int millis = 0) {
  return UtcTime(date) + std::chrono::hours(hours) +
         std::chrono::minutes(minutes) + std::chrono::seconds(seconds) +
         std::chrono::milliseconds(millis);
}

UtcTime SystemNow();

}  // namespace ctrace

#endif  // CTRACE_COMMON_TIME_H_
