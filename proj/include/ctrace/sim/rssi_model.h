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
#ifndef CTRACE_SIM_RSSI_MODEL_H_
#define CTRACE_SIM_RSSI_MODEL_H_

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"

namespace ctrace::sim {

// Log-distance path loss with Gaussian shadowing.
struct RssiParams {
  double p0_dbm = -45.0;  // at 1 m
  double path_loss_exponent = 2.2;
  double sigma_db = 4.0;
  int min_dbm = -120;
  int max_dbm = -20;
};

double MeanRssi(double distance_m, const RssiParams& params = {});

// P0 - 10 n log10(d) + N(0, sigma^2), rounded and clamped.
absl::StatusOr<int> ModelRssi(double distance_m, RandomSource& rng,
                              const RssiParams& params = {});

}  // namespace ctrace::sim

#endif  // CTRACE_SIM_RSSI_MODEL_H_
