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
#ifndef CTRACE_HARNESS_E2E_H_
#define CTRACE_HARNESS_E2E_H_

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/harness/client_app.h"
#include "ctrace/harness/outcome.h"
#include "ctrace/harness/tracing_api.h"
#include "ctrace/server/http_frontend.h"
#include "ctrace/server/tracing_server.h"
#include "ctrace/sim/scenario.h"
#include "ctrace/sim/simulator.h"

namespace ctrace::harness {

inline constexpr char kHarnessCredential[] = "harness-medical-officer";

// Simulated wall clock shared by the server and every client of a run.
class ManualClock {
 public:
  explicit ManualClock(UtcTime start) : ms_(start.time_since_epoch().count()) {}
  UtcTime Now() const { return UtcTime(std::chrono::milliseconds(ms_.load())); }
  void Set(UtcTime t) { ms_.store(t.time_since_epoch().count()); }
  void Advance(std::chrono::milliseconds d) { ms_.fetch_add(d.count()); }
  Clock AsClock() {
    return [this] { return Now(); };
  }

 private:
  std::atomic<int64_t> ms_;
};

enum class Transport { kLocal, kHttp };

struct HarnessOptions {
  ReleaseMode mode = ReleaseMode::kPsi;
  Transport transport = Transport::kLocal;
  server::ServerConfig server;
  // Seeds the server and every client; the scenario seed drives the radio.
  uint64_t seed = 1;
};

std::string_view ModeName(ReleaseMode mode);
absl::StatusOr<ReleaseMode> ParseMode(std::string_view name);

// One tracing server, optionally behind HTTP on a loopback port, and a
// handle clients use to reach it.
class Deployment {
 public:
  static absl::StatusOr<std::unique_ptr<Deployment>> Start(
      const HarnessOptions& options, UtcTime now);
  ~Deployment();

  server::TracingServer& server() { return *server_; }
  TracingApi& api() { return *api_; }
  ManualClock& clock() { return clock_; }
  const HarnessOptions& options() const { return options_; }

  absl::StatusOr<std::string> IssueTan(AuthorizationKind kind);
  // Moves the clock one batch period forward and seals what is due.
  void AdvanceAndSeal();

  // Matches for one client in the deployment's release mode.
  absl::StatusOr<MatchReport> Check(ClientApp& client);

 private:
  explicit Deployment(const HarnessOptions& options, UtcTime now)
      : options_(options), clock_(now) {}

  HarnessOptions options_;
  ManualClock clock_;
  std::unique_ptr<server::TracingServer> server_;
  std::unique_ptr<server::HttpFrontend> http_;
  std::unique_ptr<TracingApi> api_;
};

// Appends FIRST/SECOND notifications for whatever the report matched.
void RecordNotifications(const std::string& node, const std::string& phase,
                         const MatchReport& report,
                         std::vector<Notification>& out);

// A deployment plus one device per scenario node whose stores hold what the
// simulated radios received. The clock stands just after the encounters.
struct World {
  sim::Scenario scenario;
  std::unique_ptr<Deployment> deployment;
  std::vector<std::unique_ptr<ClientApp>> clients;  // scenario order
  sim::SimTrace trace;
  std::string trace_text;

  ClientApp& client(std::string_view id) {
    return *clients.at(static_cast<size_t>(scenario.NodeIndex(id)));
  }
};

// Devices learn their encounters by reading back the written trace, so the
// trace format is exercised by every run.
absl::StatusOr<World> BuildWorld(const sim::Scenario& scenario,
                                 const HarnessOptions& options);

struct E2eRun {
  ScenarioOutcome outcome;
  World world;
};

// BuildWorld, then: reporters upload under medical TANs, a batch is sealed
// and every other device checks; then second-order nodes prove contact and
// upload, another batch is sealed and the remaining devices check again.
absl::StatusOr<E2eRun> RunE2e(const sim::Scenario& scenario,
                              const HarnessOptions& options);

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_E2E_H_
