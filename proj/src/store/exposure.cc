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
#include "ctrace/store/exposure.h"

#include <algorithm>
#include <string>
#include <vector>

namespace ctrace::store {

std::string_view CategoryName(ExposureCategory category) {
  switch (category) {
    case ExposureCategory::kNone:
      return "NONE";
    case ExposureCategory::kLow:
      return "LOW";
    case ExposureCategory::kMedium:
      return "MEDIUM";
    case ExposureCategory::kHigh:
      return "HIGH";
  }
  return "NONE";
}

absl::StatusOr<ExposureCategory> ParseCategory(std::string_view name) {
  for (ExposureCategory c : kAllCategories) {
    if (CategoryName(c) == name) return c;
  }
  return absl::InvalidArgumentError("unknown exposure category: " +
                                    std::string(name));
}

ExposureCategory ClassifyExposure(std::chrono::milliseconds duration,
                                  double median_rssi,
                                  const ExposureThresholds& thresholds) {
  if (duration >= thresholds.high_min_duration &&
      median_rssi >= thresholds.high_min_rssi) {
    return ExposureCategory::kHigh;
  }
  if (duration >= thresholds.medium_min_duration &&
      median_rssi >= thresholds.medium_min_rssi) {
    return ExposureCategory::kMedium;
  }
  if (duration >= thresholds.low_min_duration) return ExposureCategory::kLow;
  return ExposureCategory::kNone;
}

double MedianRssi(std::span<const int> samples_dbm) {
  std::vector<int> sorted(samples_dbm.begin(), samples_dbm.end());
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  if (n % 2 == 1) return sorted[n / 2];
  return (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
}

}  // namespace ctrace::store
