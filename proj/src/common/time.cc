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
#include "ctrace/common/time.h"

#include <cstdio>


namespace ctrace {

std::string FormatIsoDate(Date date) {
  std::chrono::year_month_day ymd(date);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()));
  return buf;
}

std::string FormatIsoTimestamp(UtcTime t) {
  Date date = DateOf(t);
  auto rem = t - UtcTime(date);
  long long ms = rem.count();
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%sT%02lld:%02lld:%02lld.%03lldZ",
                FormatIsoDate(date).c_str(), ms / 3600000,
                ms / 60000 % 60, ms / 1000 % 60, ms % 1000);
  return buf;
}

namespace {

bool ParseFixed(std::string_view text, size_t pos, size_t len, int* out) {
  if (pos + len > text.size()) return false;
  int v = 0;
  for (size_t i = pos; i < pos + len; ++i) {
    char c = text[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  *out = v;
  return true;
}

}  // namespace

absl::StatusOr<Date> ParseIsoDate(std::string_view text) {
  int y, m, d;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
      !ParseFixed(text, 0, 4, &y) || !ParseFixed(text, 5, 2, &m) ||
      !ParseFixed(text, 8, 2, &d)) {
    return absl::InvalidArgumentError("malformed ISO date: " +
                                      std::string(text));
  }
  std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(m),
                                  std::chrono::day(d)};
  if (!ymd.ok()) {
    return absl::InvalidArgumentError("invalid calendar date: " +
                                      std::string(text));
  }
  return Date(ymd);
}

absl::StatusOr<UtcTime> ParseIsoTimestamp(std::string_view text) {
  auto bad = [&] {
    return absl::InvalidArgumentError("malformed ISO timestamp: " +
                                      std::string(text));
  };
  if (text.size() < 20 || text[10] != 'T' || text.back() != 'Z') return bad();
  auto date = ParseIsoDate(text.substr(0, 10));
  if (!date.ok()) return date.status();
  int hh, mm, ss;
  if (text[13] != ':' || text[16] != ':' || !ParseFixed(text, 11, 2, &hh) ||
      !ParseFixed(text, 14, 2, &mm) || !ParseFixed(text, 17, 2, &ss)) {
    return bad();
  }
  if (hh > 23 || mm > 59 || ss > 59) return bad();
  int millis = 0;
  std::string_view frac = text.substr(19, text.size() - 20);
  if (!frac.empty()) {
    if (frac[0] != '.' || frac.size() < 2 || frac.size() > 4) return bad();
    int v;
    if (!ParseFixed(frac, 1, frac.size() - 1, &v)) return bad();
    for (size_t i = frac.size() - 1; i < 3; ++i) v *= 10;
    millis = v;
  }
  return MakeTime(*date, hh, mm, ss, millis);
}

UtcTime SystemNow() {
  return std::chrono::floor<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

}  // namespace ctrace
