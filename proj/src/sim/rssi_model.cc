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
#include "ctrace/sim/rssi_model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ctrace::sim {

double MeanRssi(double distance_m, const RssiParams& params) {
  return params.p0_dbm - 10.0 * params.path_loss_exponent * std::log10(distance_m);
}

absl::StatusOr<int> ModelRssi(double distance_m, RandomSource& rng,
                              const RssiParams& params) {
  if (!(distance_m > 0.0)) {
    return absl::InvalidArgumentError("distance must be positive, got " +
                                      std::to_string(distance_m));
  }
  double value = MeanRssi(distance_m, params);
  if (params.sigma_db > 0.0) {
    std::normal_distribution<double> noise(0.0, params.sigma_db);
    value += noise(rng);
  }
  int dbm = static_cast<int>(std::lround(value));
  return std::clamp(dbm, params.min_dbm, params.max_dbm);
}

}  // namespace ctrace::sim
