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
#include "ctrace/harness/e2e.h"

#include <algorithm>
#include <set>

#include "ctrace/common/status_macros.h"
#include "ctrace/sim/trace_io.h"

namespace ctrace::harness {

std::string_view ModeName(ReleaseMode mode) {
  return mode == ReleaseMode::kPsi ? "psi" : "direct";
}

absl::StatusOr<ReleaseMode> ParseMode(std::string_view name) {
  if (name == "psi") return ReleaseMode::kPsi;
  if (name == "direct") return ReleaseMode::kDirect;
  return absl::InvalidArgumentError("mode must be direct or psi, got '" +
                                    std::string(name) + "'");
}

absl::StatusOr<std::unique_ptr<Deployment>> Deployment::Start(
    const HarnessOptions& options, UtcTime now) {
  std::unique_ptr<Deployment> d(new Deployment(options, now));
  server::ServerConfig config = options.server;
  if (std::find(config.medical_credentials.begin(), config.medical_credentials.end(),
                kHarnessCredential) == config.medical_credentials.end()) {
    config.medical_credentials.push_back(kHarnessCredential);
  }
  ASSIGN_OR_RETURN(d->server_,
                   server::TracingServer::Create(
                       config, now,
                       std::make_unique<SeededRandom>(DeriveSeed(options.seed, 7))));
  if (options.transport == Transport::kHttp) {
    d->http_ = std::make_unique<server::HttpFrontend>(*d->server_, d->clock_.AsClock());
    ASSIGN_OR_RETURN(int port, d->http_->Start("127.0.0.1", 0));
    d->api_ = std::make_unique<HttpTracingApi>("127.0.0.1", port);
  } else {
    d->api_ = std::make_unique<LocalTracingApi>(*d->server_, d->clock_.AsClock());
  }
  return d;
}

Deployment::~Deployment() {
  api_.reset();
  if (http_) http_->Stop();
}

absl::StatusOr<std::string> Deployment::IssueTan(AuthorizationKind kind) {
  ASSIGN_OR_RETURN(auto auth, api_->IssueTan(kind, kHarnessCredential));
  return auth.tan;
}

void Deployment::AdvanceAndSeal() {
  clock_.Advance(std::chrono::duration_cast<std::chrono::milliseconds>(
      server_->config().batch_period));
  server_->Tick(clock_.Now());
}

absl::StatusOr<MatchReport> Deployment::Check(ClientApp& client) {
  if (options_.mode == ReleaseMode::kDirect) return client.CheckDirect(*api_);
  return client.CheckPsi(*api_, "device-" + client.id(), server_->config().min_query);
}

void RecordNotifications(const std::string& node, const std::string& phase,
                         const MatchReport& report,
                         std::vector<Notification>& out) {
  if (report.first_order > 0) {
    out.push_back({node, server::OrderTag::kFirstOrder, report.first_by_category,
                   report.first_order, phase});
  }
  if (report.second_order > 0) {
    out.push_back({node, server::OrderTag::kSecondOrder, report.second_by_category,
                   report.second_order, phase});
  }
}

absl::StatusOr<World> BuildWorld(const sim::Scenario& scenario,
                                 const HarnessOptions& options) {
  World world;
  world.scenario = scenario;
  ASSIGN_OR_RETURN(world.deployment, Deployment::Start(options, scenario.start));
  for (size_t i = 0; i < scenario.nodes.size(); ++i) {
    world.clients.push_back(std::make_unique<ClientApp>(
        scenario.nodes[i].id, DeriveSeed(options.seed, 1000 + i)));
  }
  auto& clients = world.clients;
  absl::Status key_error;
  sim::TcnSource source = [&](int node, UtcTime t) {
    auto tcn = clients[node]->OwnTcnAt(t);
    if (!tcn.ok()) {
      key_error.Update(tcn.status());
      return tcn::TemporaryContactNumber{};
    }
    return *tcn;
  };
  ASSIGN_OR_RETURN(world.trace, sim::RunScenario(scenario, source));
  RETURN_IF_ERROR(key_error);

  world.trace_text = sim::FormatTrace(world.trace);
  ASSIGN_OR_RETURN(auto parsed, sim::ParseTrace(world.trace_text));
  std::map<std::string, store::EncounterStore*> stores;
  for (auto& c : clients) stores[c->id()] = &c->store();
  RETURN_IF_ERROR(sim::ApplyToStores(parsed, stores));

  world.deployment->clock().Set(
      scenario.start + std::chrono::milliseconds(world.trace.duration_us / 1000) +
      std::chrono::seconds(1));
  return world;
}

absl::StatusOr<E2eRun> RunE2e(const sim::Scenario& scenario,
                              const HarnessOptions& options) {
  for (const auto* ids : {&scenario.reporters, &scenario.second_order}) {
    for (const auto& id : *ids) {
      if (scenario.NodeIndex(id) < 0) {
        return absl::InvalidArgumentError("unknown node '" + id + "'");
      }
    }
  }
  E2eRun run;
  ScenarioOutcome& outcome = run.outcome;
  outcome.scenario = "e2e";
  outcome.mode = std::string(ModeName(options.mode));
  ASSIGN_OR_RETURN(run.world, BuildWorld(scenario, options));
  World& world = run.world;
  Deployment& deployment = *world.deployment;
  ManualClock& clock = deployment.clock();

  std::set<std::string> reported;
  auto check_all = [&](const std::string& phase) -> absl::Status {
    for (auto& c : world.clients) {
      if (reported.count(c->id())) continue;
      ASSIGN_OR_RETURN(auto match, deployment.Check(*c));
      RecordNotifications(c->id(), phase, match, outcome.notifications);
    }
    return absl::OkStatus();
  };

  size_t first_accepted = 0;
  for (const auto& id : scenario.reporters) {
    ASSIGN_OR_RETURN(std::string tan, deployment.IssueTan(AuthorizationKind::kMedical));
    ASSIGN_OR_RETURN(size_t n,
                     world.client(id).ReportInfection(deployment.api(), tan, clock.Now()));
    first_accepted += n;
    reported.insert(id);
  }
  deployment.AdvanceAndSeal();
  RETURN_IF_ERROR(check_all("after-first-report"));

  size_t proofs_accepted = 0, second_accepted = 0;
  if (!scenario.second_order.empty()) {
    for (const auto& id : scenario.second_order) {
      ClientApp& c = world.client(id);
      auto auth = c.ProveContact(deployment.api(),
                                 deployment.server().config().max_proof_responses);
      if (!auth.ok()) continue;
      ++proofs_accepted;
      ASSIGN_OR_RETURN(size_t n, c.ReportInfection(deployment.api(), auth->tan,
                                                   clock.Now()));
      second_accepted += n;
      reported.insert(id);
    }
    deployment.AdvanceAndSeal();
    RETURN_IF_ERROR(check_all("after-second-order-report"));
  }

  uint64_t tx = 0;
  for (const auto& s : world.trace.stats) tx += s.tx_count;
  outcome.AddMetric("nodes", scenario.nodes.size());
  outcome.AddMetric("transmissions", static_cast<size_t>(tx));
  outcome.AddMetric("receptions", world.trace.rx.size());
  outcome.AddMetric("first_order_ce_tcns_accepted", first_accepted);
  outcome.AddMetric("contact_proofs_accepted", proofs_accepted);
  outcome.AddMetric("second_order_ce_tcns_accepted", second_accepted);
  outcome.AddMetric("sealed_batches", deployment.server().BatchIds().size());
  std::set<std::string> notified;
  for (const auto& n : outcome.notifications) notified.insert(n.node);
  outcome.AddMetric("notified_nodes", notified.size());
  return run;
}

}  // namespace ctrace::harness
