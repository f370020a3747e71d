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
// ctrace: run simulations, end-to-end scenarios, attack experiments and PSI
// benchmarks, or serve the tracing API.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "ctrace/common/bytes.h"
#include "ctrace/common/text.h"
#include "ctrace/harness/attacks.h"
#include "ctrace/harness/bench.h"
#include "ctrace/harness/e2e.h"
#include "ctrace/harness/outcome.h"
#include "ctrace/harness/server_config.h"
#include "ctrace/server/http_frontend.h"
#include "ctrace/sim/latency.h"
#include "ctrace/sim/simulator.h"
#include "ctrace/sim/trace_io.h"
#include "ctrace/store/encounter_store.h"

namespace ctrace {
namespace {

namespace fs = std::filesystem;
using harness::ScenarioOutcome;
using harness::Verdict;

struct GlobalFlags {
  uint64_t seed = 1;
  std::string config;
  std::string mode = "psi";
  std::string out = ".";
};

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status << "\n";
  return 2;
}

absl::Status Emit(const GlobalFlags& g, const std::string& name,
                  const nlohmann::json& body) {
  std::error_code ec;
  fs::create_directories(g.out, ec);
  if (ec) return absl::UnavailableError("cannot create " + g.out + ": " + ec.message());
  std::string path = (fs::path(g.out) / name).string();
  std::cout << "wrote " << path << "\n";
  return harness::WriteFile(path, body.dump(2) + "\n");
}

absl::StatusOr<sim::Scenario> ScenarioFromFlags(const GlobalFlags& g, bool seed_set) {
  if (g.config.empty()) {
    return absl::InvalidArgumentError("--config <scenario file> is required");
  }
  auto scenario = sim::LoadScenario(g.config);
  if (!scenario.ok()) return scenario.status();
  if (seed_set) scenario->seed = g.seed;
  return scenario;
}

int RunSimulate(const GlobalFlags& g, bool seed_set) {
  auto scenario = ScenarioFromFlags(g, seed_set);
  if (!scenario.ok()) return Fail(scenario.status());
  auto trace = sim::RunScenario(*scenario, sim::SeededTcnSource(scenario->seed,
                                                                scenario->nodes.size()));
  if (!trace.ok()) return Fail(trace.status());

  std::vector<std::vector<std::string>> rows;
  for (size_t i = 0; i < trace->node_ids.size(); ++i) {
    const auto& s = trace->stats[i];
    char duty[32];
    std::snprintf(duty, sizeof(duty), "%.4f", s.RadioDuty(scenario->radio.tx_duration_ms));
    rows.push_back({trace->node_ids[i], std::to_string(s.tx_count),
                    std::to_string(s.rx_count), std::to_string(s.collision_losses),
                    std::to_string(s.half_duplex_losses), duty});
  }
  std::cout << harness::FormatTextTable(
      {"node", "tx", "rx", "collision_losses", "half_duplex_losses", "radio_duty"}, rows);

  auto latencies = sim::DiscoveryLatencies(*scenario, *trace);
  sim::LatencySummary sum = sim::Summarize(latencies);
  std::cout << "\ndiscovery latency over " << sum.pairs << " ordered pairs ("
            << sum.censored << " censored): min " << sum.min_ms << " ms, median "
            << sum.median_ms << " ms, p95 " << sum.p95_ms << " ms, max " << sum.max_ms
            << " ms\n";

  std::error_code ec;
  fs::create_directories(g.out, ec);
  std::string trace_path = (fs::path(g.out) / "trace.tsv").string();
  if (auto s = harness::WriteFile(trace_path, sim::FormatTrace(*trace)); !s.ok()) {
    return Fail(s);
  }
  std::cout << "wrote " << trace_path << "\n";
  nlohmann::json summary = {{"pairs", sum.pairs},       {"censored", sum.censored},
                            {"min_ms", sum.min_ms},     {"median_ms", sum.median_ms},
                            {"p95_ms", sum.p95_ms},     {"max_ms", sum.max_ms},
                            {"receptions", trace->rx.size()}};
  if (auto s = Emit(g, "simulate.json", summary); !s.ok()) return Fail(s);
  return 0;
}

absl::StatusOr<harness::HarnessOptions> HarnessFromFlags(const GlobalFlags& g,
                                                         const std::string& transport,
                                                         const std::string& server_config) {
  harness::HarnessOptions o;
  auto mode = harness::ParseMode(g.mode);
  if (!mode.ok()) return mode.status();
  o.mode = *mode;
  o.seed = g.seed;
  if (transport == "http") {
    o.transport = harness::Transport::kHttp;
  } else if (transport != "local") {
    return absl::InvalidArgumentError("--transport must be local or http");
  }
  if (!server_config.empty()) {
    auto config = harness::LoadServerConfig(server_config);
    if (!config.ok()) return config.status();
    o.server = *config;
  }
  return o;
}

int RunE2eVerb(const GlobalFlags& g, bool seed_set, const std::string& transport,
               const std::string& server_config) {
  auto scenario = ScenarioFromFlags(g, seed_set);
  if (!scenario.ok()) return Fail(scenario.status());
  auto options = HarnessFromFlags(g, transport, server_config);
  if (!options.ok()) return Fail(options.status());
  auto run = harness::RunE2e(*scenario, *options);
  if (!run.ok()) return Fail(run.status());
  std::cout << run->outcome.FormatTable();
  std::error_code ec;
  fs::create_directories(g.out, ec);
  std::string trace_path = (fs::path(g.out) / "e2e-trace.tsv").string();
  if (auto s = harness::WriteFile(trace_path, run->world.trace_text); !s.ok()) return Fail(s);
  if (auto s = Emit(g, "e2e.json", run->outcome.ToJson()); !s.ok()) return Fail(s);
  return 0;
}

// Direct-mode linkage must stay VULNERABLE (it is why PSI exists); every
// other attack must be DEFENDED. Control runs with the limit off are
// informational.
bool VerdictAsRequired(const std::string& name, const ScenarioOutcome& out,
                       const harness::AttackOptions& o) {
  if (name == "linkage" && o.harness.mode == server::ReleaseMode::kDirect) {
    return out.verdict == Verdict::kVulnerable;
  }
  if (name == "linkage" && o.harness.server.psi_sessions_per_window <= 0) return true;
  return out.verdict == Verdict::kDefended;
}

int RunAttackVerb(const GlobalFlags& g, const std::string& name,
                  const std::string& transport, const std::string& server_config,
                  int trials, size_t population, size_t forged, bool no_rate_limit) {
  auto options = HarnessFromFlags(g, transport, server_config);
  if (!options.ok()) return Fail(options.status());
  harness::AttackOptions o;
  o.harness = *options;
  o.trials = trials;
  o.logged_population = population;
  o.forged_proofs = forged;
  if (no_rate_limit) o.harness.server.psi_sessions_per_window = 0;
  auto out = harness::RunAttack(name, o);
  if (!out.ok()) return Fail(out.status());
  std::cout << out->FormatTable();
  if (auto s = Emit(g, "attack-" + name + ".json", out->ToJson()); !s.ok()) return Fail(s);
  if (!VerdictAsRequired(name, *out, o)) {
    std::cerr << "required verdict not met for " << name << "\n";
    return 1;
  }
  return 0;
}

int RunBench(const GlobalFlags& g, const std::string& sizes_text) {
  std::vector<size_t> sizes;
  for (auto part : SplitOn(sizes_text, ',')) {
    part = Trim(part);
    if (part.empty()) continue;
    size_t n = 0;
    if (!ParseNumber(part, &n) || n == 0) {
      return Fail(absl::InvalidArgumentError("bad size '" + std::string(part) + "'"));
    }
    sizes.push_back(n);
  }
  auto report = harness::BenchPsi(sizes, g.seed);
  if (!report.ok()) return Fail(report.status());
  std::cout << report->FormatTable();
  if (auto s = Emit(g, "bench-psi.json", report->ToJson()); !s.ok()) return Fail(s);
  for (const auto& r : report->rows) {
    if (!r.correct()) return 1;
  }
  return 0;
}

std::atomic<server::HttpFrontend*> g_frontend{nullptr};

void StopOnSignal(int) {
  if (auto* f = g_frontend.load()) f->Stop();
}

int RunServe(const GlobalFlags& g, const std::string& host, int port) {
  server::ServerConfig config;
  if (!g.config.empty()) {
    auto loaded = harness::LoadServerConfig(g.config);
    if (!loaded.ok()) return Fail(loaded.status());
    config = *loaded;
  }
  if (config.medical_credentials.empty()) {
    std::cerr << "warning: no medical_credential configured; no TAN can be issued\n";
  }
  auto server = server::TracingServer::Create(config, SystemNow(),
                                              std::make_unique<SecureRandom>());
  if (!server.ok()) return Fail(server.status());
  server::HttpFrontend frontend(**server, SystemNow);
  g_frontend = &frontend;
  std::signal(SIGINT, StopOnSignal);
  std::signal(SIGTERM, StopOnSignal);
  std::atomic<bool> running{true};
  std::thread sealer([&] {
    while (running) {
      (*server)->Tick(SystemNow());
      for (int i = 0; i < 60 && running; ++i) {
        std::this_thread::sleep_for(std::chrono::seconds(1));
      }
    }
  });
  std::cout << "serving on " << host << ":" << port << "\n" << std::flush;
  absl::Status s = frontend.Serve(host, port);
  running = false;
  sealer.join();
  g_frontend = nullptr;
  if (!s.ok()) return Fail(s);
  return 0;
}

int RunPurge(const GlobalFlags& g, const std::string& now_text,
             const std::string& store_path, const std::string& secret_hex) {
  UtcTime now = SystemNow();
  if (!now_text.empty()) {
    auto parsed = ParseIsoTimestamp(now_text);
    if (!parsed.ok()) return Fail(parsed.status());
    now = *parsed;
  }
  bool did_something = false;
  if (!g.config.empty()) {
    auto config = harness::LoadServerConfig(g.config);
    if (!config.ok()) return Fail(config.status());
    if (config->log_path.empty()) {
      return Fail(absl::InvalidArgumentError("server config has no log_path"));
    }
    auto server = server::TracingServer::Create(*config, now,
                                                std::make_unique<SecureRandom>());
    if (!server.ok()) return Fail(server.status());
    size_t removed = (*server)->PurgeBatches(now);
    std::cout << "server: removed " << removed << " batches, "
              << (*server)->BatchIds().size() << " remain\n";
    did_something = true;
  }
  if (!store_path.empty()) {
    auto secret = HexDecode(secret_hex);
    if (!secret.ok()) return Fail(secret.status());
    auto store = store::EncounterStore::LoadSealed(store_path, *secret);
    if (!store.ok()) return Fail(store.status());
    size_t removed = store->PurgeExpired(now, store::RetentionPolicy::Default());
    if (auto s = store->SaveSealed(store_path, *secret); !s.ok()) return Fail(s);
    std::cout << "store: removed " << removed << " entries, " << store->record_count()
              << " records remain\n";
    did_something = true;
  }
  if (!did_something) {
    return Fail(absl::InvalidArgumentError(
        "nothing to purge: pass --config <server config> and/or --store"));
  }
  return 0;
}

}  // namespace
}  // namespace ctrace

int main(int argc, char** argv) {
  using namespace ctrace;
  CLI::App app{"ctrace: decentralized contact tracing toolkit"};
  app.require_subcommand(1);
  GlobalFlags g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed for every random choice")
                       ->capture_default_str();
  app.add_option("--config", g.config,
                 "Scenario file (simulate, e2e) or server config (serve, purge)");
  app.add_option("--mode", g.mode, "Release mode: direct or psi")
      ->check(CLI::IsMember({"direct", "psi"}))
      ->capture_default_str();
  app.add_option("--out", g.out, "Directory for result files")->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Run the BLE simulator on a scenario");

  std::string transport = "local", server_config;
  auto* e2e = app.add_subcommand("e2e", "Encounters, reports and matching end to end");
  e2e->add_option("--transport", transport, "local or http")->capture_default_str();
  e2e->add_option("--server-config", server_config, "Server config file");

  std::string attack_name;
  int trials = 100;
  size_t population = 1000, forged = 10000;
  bool no_rate_limit = false;
  auto* attack = app.add_subcommand("attack", "Run an attack experiment");
  attack->add_option("name", attack_name, "linkage, rebroadcast, foreign-upload or self-report")
      ->required()
      ->check(CLI::IsMember({"linkage", "rebroadcast", "foreign-upload", "self-report"}));
  attack->add_option("--trials", trials, "Seeded trials")->capture_default_str();
  attack->add_option("--population", population, "Linkage: logged TCNs")
      ->capture_default_str();
  attack->add_option("--forged", forged, "Self-report: forged proof responses")
      ->capture_default_str();
  attack->add_flag("--no-rate-limit", no_rate_limit, "Disable the PSI session limit");
  attack->add_option("--transport", transport, "local or http")->capture_default_str();
  attack->add_option("--server-config", server_config, "Server config file");

  std::string sizes = "100,1000,10000";
  auto* bench = app.add_subcommand("bench-psi", "Time the PSI phases");
  bench->add_option("--sizes", sizes, "Comma-separated set sizes")->capture_default_str();

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Serve the tracing API over HTTP");
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--port", port)->capture_default_str();

  std::string now_text, store_path, secret_hex;
  auto* purge = app.add_subcommand("purge", "Apply the retention window");
  purge->add_option("--now", now_text, "ISO-8601 time to purge at (default: now)");
  purge->add_option("--store", store_path, "Sealed device store to purge");
  purge->add_option("--secret", secret_hex, "Hex device secret for --store");

  CLI11_PARSE(app, argc, argv);
  bool seed_set = seed_opt->count() > 0;
  if (simulate->parsed()) return RunSimulate(g, seed_set);
  if (e2e->parsed()) return RunE2eVerb(g, seed_set, transport, server_config);
  if (attack->parsed()) {
    return RunAttackVerb(g, attack_name, transport, server_config, trials, population,
                         forged, no_rate_limit);
  }
  if (bench->parsed()) return RunBench(g, sizes);
  if (serve->parsed()) return RunServe(g, host, port);
  if (purge->parsed()) return RunPurge(g, now_text, store_path, secret_hex);
  return 2;
}
