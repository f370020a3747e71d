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
#ifndef CTRACE_STORE_EXPOSURE_H_
#define CTRACE_STORE_EXPOSURE_H_

#include <array>
#include <chrono>
#include <span>
#include <string_view>

#include "absl/status/statusor.h"

namespace ctrace::store {

// Ordered from weakest to strongest.
enum class ExposureCategory { kNone = 0, kLow = 1, kMedium = 2, kHigh = 3 };

inline constexpr std::array<ExposureCategory, 4> kAllCategories = {
    ExposureCategory::kNone, ExposureCategory::kLow, ExposureCategory::kMedium,
    ExposureCategory::kHigh};

std::string_view CategoryName(ExposureCategory category);
absl::StatusOr<ExposureCategory> ParseCategory(std::string_view name);

// Decision table over (contact duration, median RSSI). A record lives inside
// a single ten-minute interval, so the HIGH duration bar sits at nine
// minutes: a contact spanning a whole interval is observed for at most
// 600 s minus the scan gaps at either end.
struct ExposureThresholds {
  std::chrono::milliseconds high_min_duration = std::chrono::seconds(540);
  double high_min_rssi = -65.0;
  std::chrono::milliseconds medium_min_duration = std::chrono::seconds(300);
  double medium_min_rssi = -80.0;
  std::chrono::milliseconds low_min_duration = std::chrono::seconds(60);
};

ExposureCategory ClassifyExposure(std::chrono::milliseconds duration,
                                  double median_rssi,
                                  const ExposureThresholds& thresholds = {});

// Median of the samples; mean of the two middle values for even counts.
// Requires a non-empty input.
double MedianRssi(std::span<const int> samples_dbm);

}  // namespace ctrace::store

#endif  // CTRACE_STORE_EXPOSURE_H_
