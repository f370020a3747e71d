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
#ifndef CTRACE_HARNESS_BENCH_H_
#define CTRACE_HARNESS_BENCH_H_

#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace ctrace::harness {

// Wall-clock cost of one PSI cardinality run with |U| = |S| = size and half
// of U inside S.
struct BenchRow {
  size_t size = 0;
  double server_setup_ms = 0;   // encrypt S, build filter
  double client_round1_ms = 0;  // hash, pad, encrypt U
  double server_respond_ms = 0; // re-encrypt and shuffle U
  double client_finish_ms = 0;  // strip and test
  size_t cardinality = 0;
  size_t expected = 0;

  double total_ms() const {
    return server_setup_ms + client_round1_ms + server_respond_ms + client_finish_ms;
  }
  // Bloom false positives can only add.
  bool correct() const { return cardinality >= expected && cardinality <= expected + 3; }
};

struct BenchReport {
  std::vector<BenchRow> rows;
  // Least-squares fit of server_respond_ms against size.
  double respond_slope_ms = 0;
  double respond_r2 = 0;

  std::string FormatTable() const;
  nlohmann::json ToJson() const;
};

// Coefficient of determination of the least-squares line through (x, y).
double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y,
                   double* slope = nullptr);

absl::StatusOr<BenchReport> BenchPsi(const std::vector<size_t>& sizes,
                                     uint64_t seed);

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_BENCH_H_
