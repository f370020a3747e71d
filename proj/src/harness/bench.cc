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
#include "ctrace/harness/bench.h"

#include <chrono>
#include <cstdio>

#include "ctrace/common/random.h"
#include "ctrace/common/status_macros.h"
#include "ctrace/harness/outcome.h"
#include "ctrace/psi/psi_session.h"

namespace ctrace::harness {
namespace {

using Stopwatch = std::chrono::steady_clock;

double MsSince(Stopwatch::time_point t0) {
  return std::chrono::duration<double, std::milli>(Stopwatch::now() - t0).count();
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::vector<tcn::ContactEventTcn> RandomCeTcns(size_t n, RandomSource& rng) {
  std::vector<tcn::ContactEventTcn> out(n);
  for (auto& ce : out) (void)rng.Fill(ce.bytes);
  return out;
}

}  // namespace

double LinearFitR2(const std::vector<double>& x, const std::vector<double>& y,
                   double* slope) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) return 0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return 0;
  double b = sxy / sxx;
  if (slope != nullptr) *slope = b;
  if (syy == 0) return 1;
  return (b * sxy) / syy;
}

absl::StatusOr<BenchReport> BenchPsi(const std::vector<size_t>& sizes,
                                     uint64_t seed) {
  BenchReport report;
  SeededRandom rng(seed);
  for (size_t size : sizes) {
    BenchRow row;
    row.size = size;
    row.expected = size / 2;
    auto shared = RandomCeTcns(row.expected, rng);
    auto server_set = RandomCeTcns(size - row.expected, rng);
    auto client_set = RandomCeTcns(size - row.expected, rng);
    server_set.insert(server_set.end(), shared.begin(), shared.end());
    client_set.insert(client_set.end(), shared.begin(), shared.end());

    auto t0 = Stopwatch::now();
    ASSIGN_OR_RETURN(auto server_key, psi::CommutativeKey::Generate(rng));
    auto encrypted = psi::EncryptSet(server_key, server_set);
    psi::BloomFilter filter = psi::BuildBloomFilter(encrypted);
    row.server_setup_ms = MsSince(t0);

    t0 = Stopwatch::now();
    ASSIGN_OR_RETURN(auto client, psi::PsiClientSession::Create(client_set, 1, rng));
    ASSIGN_OR_RETURN(auto sent, client.Round1(rng));
    row.client_round1_ms = MsSince(t0);

    t0 = Stopwatch::now();
    ASSIGN_OR_RETURN(auto answered, psi::ServerRespond(server_key, sent, 1, rng));
    row.server_respond_ms = MsSince(t0);

    t0 = Stopwatch::now();
    std::vector<psi::BatchReply> replies = {{1, answered, {&filter}}};
    ASSIGN_OR_RETURN(auto result, client.Finish(replies));
    row.client_finish_ms = MsSince(t0);
    row.cardinality = result.TotalHits();
    report.rows.push_back(row);
  }
  std::vector<double> x, y;
  for (const auto& r : report.rows) {
    x.push_back(static_cast<double>(r.size));
    y.push_back(r.server_respond_ms);
  }
  report.respond_r2 = LinearFitR2(x, y, &report.respond_slope_ms);
  return report;
}

std::string BenchReport::FormatTable() const {
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({std::to_string(r.size), Fixed(r.server_setup_ms, 1),
                     Fixed(r.client_round1_ms, 1), Fixed(r.server_respond_ms, 1),
                     Fixed(r.client_finish_ms, 1), Fixed(r.total_ms(), 1),
                     std::to_string(r.cardinality) + "/" + std::to_string(r.expected),
                     r.correct() ? "ok" : "WRONG"});
  }
  std::string out = FormatTextTable(
      {"size", "server_setup_ms", "client_round1_ms", "server_respond_ms",
       "client_finish_ms", "total_ms", "cardinality", "check"},
      cells);
  if (rows.size() >= 2) {
    out += "\nserver_respond_ms per element: " + Fixed(respond_slope_ms, 4) +
           "  (R^2 = " + Fixed(respond_r2, 4) + ")\n";
  }
  return out;
}

nlohmann::json BenchReport::ToJson() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"size", r.size},
                         {"server_setup_ms", r.server_setup_ms},
                         {"client_round1_ms", r.client_round1_ms},
                         {"server_respond_ms", r.server_respond_ms},
                         {"client_finish_ms", r.client_finish_ms},
                         {"total_ms", r.total_ms()},
                         {"cardinality", r.cardinality},
                         {"expected", r.expected},
                         {"correct", r.correct()}});
  }
  return {{"rows", rows_json},
          {"server_respond_slope_ms", respond_slope_ms},
          {"server_respond_r2", respond_r2}};
}

}  // namespace ctrace::harness
