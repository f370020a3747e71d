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
#include "ctrace/harness/attacks.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ctrace/common/status_macros.h"
#include "ctrace/psi/group.h"
#include "ctrace/psi/psi_session.h"

namespace ctrace::harness {
namespace {

using server::OrderTag;
using tcn::ContactEventTcn;
using tcn::TemporaryContactNumber;

constexpr Date kAttackDay = std::chrono::sys_days(std::chrono::year(2020) /
                                                  std::chrono::April /
                                                  std::chrono::day(20));

sim::Scenario MustParse(const std::string& text) {
  auto s = sim::ParseScenario(text);
  return s.ok() ? *s : sim::Scenario{};
}

// First-order filters of every released batch, for PSI queries.
struct PsiView {
  std::vector<uint64_t> ids;
  std::vector<psi::BloomFilter> filters;
};

absl::StatusOr<PsiView> FetchPsiView(TracingApi& api) {
  ASSIGN_OR_RETURN(auto batches, api.Batches(0, ReleaseMode::kPsi));
  PsiView view;
  for (const auto& b : batches) {
    view.ids.push_back(b.batch_id);
    ASSIGN_OR_RETURN(auto f, psi::BloomFilter::Decode(b.first_order_filter));
    view.filters.push_back(std::move(f));
  }
  return view;
}

// Cardinality of one padded query against every batch.
absl::StatusOr<size_t> QueryCardinality(TracingApi& api, const std::string& token,
                                        const PsiView& view,
                                        std::vector<ContactEventTcn> group,
                                        size_t min_query, RandomSource& rng) {
  ASSIGN_OR_RETURN(auto session,
                   psi::PsiClientSession::Create(std::move(group), min_query, rng));
  ASSIGN_OR_RETURN(auto sent, session.Round1(rng));
  ASSIGN_OR_RETURN(auto reply, api.PsiRound1(token, view.ids, sent.at(0)));
  if (reply.per_batch.size() != view.ids.size()) {
    return absl::DataLossError("PSI reply covers the wrong number of batches");
  }
  std::vector<psi::BatchReply> replies;
  for (size_t i = 0; i < view.ids.size(); ++i) {
    replies.push_back({view.ids[i], reply.per_batch[i], {&view.filters[i]}});
  }
  ASSIGN_OR_RETURN(auto result, session.Finish(replies));
  return result.Hits(0, 0);
}

std::vector<tcn::DailyKey> RandomKeys(Date today, int days, RandomSource& rng) {
  std::vector<tcn::DailyKey> keys;
  for (int d = days - 1; d >= 0; --d) {
    keys.push_back(*tcn::GenerateDailyKey(today - std::chrono::days(d), rng));
  }
  return keys;
}

bool IsRateLimited(const absl::Status& s) {
  return s.code() == absl::StatusCode::kResourceExhausted;
}

struct LinkageTrial {
  bool isolated = false;          // verdict strategy
  double identification_probability = 0;
  size_t sessions = 0;
  size_t blocked = 0;
  bool adaptive_isolated = false;
  size_t adaptive_sessions = 0;
  size_t adaptive_blocked = 0;
  bool unpadded_rejected = false;
};

absl::StatusOr<LinkageTrial> RunLinkageTrial(const AttackOptions& options,
                                             uint64_t seed) {
  const size_t n = options.logged_population;
  if (n == 0) return absl::InvalidArgumentError("logged population is empty");
  HarnessOptions h = options.harness;
  h.seed = seed;
  UtcTime start = MakeTime(kAttackDay, 19, 30, 0);
  ASSIGN_OR_RETURN(auto deployment, Deployment::Start(h, start));
  TracingApi& api = deployment->api();
  SeededRandom rng(DeriveSeed(seed, 3));

  // The adversary's log: one sighting per person, spread over the day, each
  // tied to a camera frame of that person.
  std::vector<tcn::DailyKey> keys;
  std::vector<ContactEventTcn> logged;
  const int64_t spread_ms = 12LL * 3600 * 1000;
  for (size_t i = 0; i < n; ++i) {
    SeededRandom person(DeriveSeed(seed, 10000 + i));
    keys.push_back(*tcn::GenerateDailyKey(kAttackDay, person));
    UtcTime seen = MakeTime(kAttackDay, 8, 0, 0) +
                   std::chrono::milliseconds(static_cast<int64_t>(i) * spread_ms /
                                             static_cast<int64_t>(n));
    auto tin = tcn::TinOf(seen);
    TemporaryContactNumber heard = tcn::DeriveTcn(keys.back(), tin);
    logged.push_back(tcn::ComputeContactEventTcn(heard, kAttackDay, tin));
  }
  size_t infected = rng.Uniform(n);

  deployment->clock().Set(MakeTime(kAttackDay, 20, 0, 0));
  ASSIGN_OR_RETURN(std::string tan, deployment->IssueTan(AuthorizationKind::kMedical));
  RETURN_IF_ERROR(api.Report({tan, {keys[infected]}, {}}).status());
  for (size_t b = 0; b < options.background_reporters; ++b) {
    ASSIGN_OR_RETURN(std::string other, deployment->IssueTan(AuthorizationKind::kMedical));
    RETURN_IF_ERROR(api.Report({other, RandomKeys(kAttackDay, 1, rng), {}}).status());
  }
  deployment->AdvanceAndSeal();

  LinkageTrial trial;
  if (h.mode == ReleaseMode::kDirect) {
    ASSIGN_OR_RETURN(auto batches, api.Batches(0, ReleaseMode::kDirect));
    std::set<ContactEventTcn> published;
    for (const auto& b : batches) published.insert(b.first_order.begin(), b.first_order.end());
    std::vector<size_t> hits;
    for (size_t i = 0; i < n; ++i) {
      if (published.count(logged[i])) hits.push_back(i);
    }
    trial.isolated = hits.size() == 1 && hits[0] == infected;
    trial.identification_probability =
        std::count(hits.begin(), hits.end(), infected) ? 1.0 / hits.size() : 0.0;
    trial.adaptive_isolated = trial.isolated;
    return trial;
  }

  ASSIGN_OR_RETURN(PsiView view, FetchPsiView(api));
  const size_t min_query = deployment->server().config().min_query;

  // A query smaller than min_query and not padded is refused outright.
  {
    ASSIGN_OR_RETURN(auto key, psi::CommutativeKey::Generate(rng));
    std::vector<psi::GroupElement> one = {key.Encrypt(psi::HashToGroup(logged[0]))};
    auto r = api.PsiRound1("adversary-unpadded", view.ids, one);
    trial.unpadded_rejected = r.status().code() == absl::StatusCode::kInvalidArgument;
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  auto ces = [&](const std::vector<size_t>& idx) {
    std::vector<ContactEventTcn> out;
    for (size_t i : idx) out.push_back(logged[i]);
    return out;
  };

  // Counting model: disjoint groups of min_query logged TCNs.
  std::vector<size_t> positive;
  size_t examined = 0;
  for (size_t begin = 0; begin < n; begin += min_query) {
    std::vector<size_t> group(order.begin() + begin,
                              order.begin() + std::min(n, begin + min_query));
    auto hits = QueryCardinality(api, "adversary-partition", view, ces(group),
                                 min_query, rng);
    if (IsRateLimited(hits.status())) {
      ++trial.blocked;
      break;
    }
    RETURN_IF_ERROR(hits.status());
    ++trial.sessions;
    examined += group.size();
    if (*hits > 0) {
      positive = group;
      break;
    }
  }
  if (!positive.empty()) {
    bool contains = std::count(positive.begin(), positive.end(), infected) > 0;
    trial.isolated = positive.size() == 1 && contains;
    trial.identification_probability = contains ? 1.0 / positive.size() : 0.0;
  } else {
    trial.identification_probability = n > examined ? 1.0 / (n - examined) : 0.0;
  }

  // Residual: bisection whose halves are padded by the client library, which
  // the server cannot tell apart from real entries.
  std::vector<size_t> candidates = order;
  while (candidates.size() > 1) {
    std::vector<size_t> half(candidates.begin(),
                             candidates.begin() + (candidates.size() + 1) / 2);
    auto hits = QueryCardinality(api, "adversary-bisect", view, ces(half), min_query, rng);
    if (IsRateLimited(hits.status())) {
      ++trial.adaptive_blocked;
      break;
    }
    RETURN_IF_ERROR(hits.status());
    ++trial.adaptive_sessions;
    if (*hits > 0) {
      candidates = half;
    } else {
      candidates.erase(candidates.begin(), candidates.begin() + half.size());
    }
  }
  trial.adaptive_isolated = candidates.size() == 1 && candidates[0] == infected;
  return trial;
}

}  // namespace

std::vector<std::string_view> AttackNames() {
  return {"linkage", "rebroadcast", "foreign-upload", "self-report"};
}

absl::StatusOr<ScenarioOutcome> RunAttack(std::string_view name,
                                          const AttackOptions& options) {
  if (name == "linkage") return AttackLinkage(options);
  if (name == "rebroadcast") return AttackRebroadcast(options);
  if (name == "foreign-upload") return AttackForeignUpload(options);
  if (name == "self-report") return AttackSelfReport(options);
  return absl::InvalidArgumentError("unknown attack '" + std::string(name) + "'");
}

absl::StatusOr<ScenarioOutcome> AttackLinkage(const AttackOptions& options) {
  ScenarioOutcome out;
  out.scenario = "attack-linkage";
  out.mode = std::string(ModeName(options.harness.mode));
  const auto& config = options.harness.server;
  const bool limited = config.psi_sessions_per_window > 0;
  size_t isolated = 0, adaptive_isolated = 0, unpadded_rejected = 0;
  size_t sessions = 0, blocked = 0, adaptive_sessions = 0, adaptive_blocked = 0;
  double best_probability = 0;
  for (int t = 0; t < options.trials; ++t) {
    ASSIGN_OR_RETURN(auto trial, RunLinkageTrial(options, DeriveSeed(options.harness.seed, t)));
    isolated += trial.isolated;
    adaptive_isolated += trial.adaptive_isolated;
    unpadded_rejected += trial.unpadded_rejected;
    sessions += trial.sessions;
    blocked += trial.blocked;
    adaptive_sessions = std::max(adaptive_sessions, trial.adaptive_sessions);
    adaptive_blocked += trial.adaptive_blocked;
    best_probability = std::max(best_probability, trial.identification_probability);
  }
  const size_t n = options.logged_population;
  out.AddMetric("trials", static_cast<size_t>(options.trials));
  out.AddMetric("logged_tcns", n);
  if (options.harness.mode == ReleaseMode::kDirect) {
    out.AddMetric("identified_trials", isolated);
    out.AddMetric("best_identification_probability", best_probability);
    out.verdict = isolated > 0 ? Verdict::kVulnerable : Verdict::kDefended;
    return out;
  }
  double bound = limited ? static_cast<double>(config.psi_sessions_per_window) *
                               static_cast<double>(config.min_query) / static_cast<double>(n)
                         : 1.0;
  out.AddMetric("min_query", config.min_query);
  out.AddMetric("sessions_per_day", limited ? std::to_string(config.psi_sessions_per_window)
                                            : std::string("unlimited"));
  out.AddMetric("model_isolated_trials", isolated);
  out.AddMetric("model_sessions_used", sessions);
  out.AddMetric("model_sessions_blocked", blocked);
  out.AddMetric("best_identification_probability", best_probability);
  out.AddMetric("identification_bound", bound);
  out.AddMetric("unpadded_small_query_rejected", unpadded_rejected);
  out.AddMetric("adaptive_isolated_trials", adaptive_isolated);
  out.AddMetric("adaptive_max_sessions", adaptive_sessions);
  out.AddMetric("adaptive_sessions_blocked", adaptive_blocked);
  out.AddMetric("adaptive_sessions_needed",
                static_cast<size_t>(std::ceil(std::log2(static_cast<double>(n)))));
  bool defended = isolated == 0 && best_probability <= bound;
  if (!limited) defended = defended && adaptive_isolated == 0;
  out.verdict = defended ? Verdict::kDefended : Verdict::kVulnerable;
  return out;
}

sim::Scenario RebroadcastScenario(uint64_t seed, ReplayTiming timing) {
  // v and m meet in the first two minutes of interval 54; m then walks to r,
  // who never comes near v.
  std::string text =
      "start = 2020-04-20T09:00:00.000Z\n"
      "duration_s = 780\n"
      "seed = " + std::to_string(seed) + "\n"
      "node v 0:0,0 120:0,0\n"
      "node m 0:1,0 120:1,0 125:500,0 780:500,0\n"
      "node r 0:501,0 780:501,0\n"
      "report v\n";
  if (timing == ReplayTiming::kSameInterval) text += "replay m v 200 560\n";
  if (timing == ReplayTiming::kLaterInterval) text += "replay m v 640 760\n";
  return MustParse(text);
}

absl::StatusOr<ScenarioOutcome> AttackRebroadcast(const AttackOptions& options) {
  ScenarioOutcome out;
  out.scenario = "attack-rebroadcast";
  out.mode = std::string(ModeName(options.harness.mode));
  size_t later_notified = 0, same_notified = 0, control_notified = 0;
  size_t later_delivered = 0, same_delivered = 0;
  for (int t = 0; t < options.trials; ++t) {
    uint64_t seed = DeriveSeed(options.harness.seed, t);
    for (auto timing : {ReplayTiming::kNone, ReplayTiming::kSameInterval,
                        ReplayTiming::kLaterInterval}) {
      HarnessOptions h = options.harness;
      h.seed = seed;
      sim::Scenario s = RebroadcastScenario(seed, timing);
      ASSIGN_OR_RETURN(auto run, RunE2e(s, h));
      int r = s.NodeIndex("r"), m = s.NodeIndex("m"), v = s.NodeIndex("v");
      std::set<TemporaryContactNumber> victim_tcns;
      for (const auto& rx : run.world.trace.rx) {
        if (rx.tx_node == v) victim_tcns.insert(rx.tcn);
      }
      bool delivered = false;
      for (const auto& rx : run.world.trace.rx) {
        delivered |= rx.rx_node == r && rx.tx_node == m && victim_tcns.count(rx.tcn);
      }
      bool notified = run.outcome.CountFor("r", OrderTag::kFirstOrder) > 0;
      switch (timing) {
        case ReplayTiming::kNone:
          control_notified += notified;
          break;
        case ReplayTiming::kSameInterval:
          same_notified += notified;
          same_delivered += delivered;
          break;
        case ReplayTiming::kLaterInterval:
          later_notified += notified;
          later_delivered += delivered;
          break;
      }
    }
  }
  out.AddMetric("trials", static_cast<size_t>(options.trials));
  out.AddMetric("later_interval_replays_delivered", later_delivered);
  out.AddMetric("later_interval_notified_trials", later_notified);
  out.AddMetric("same_interval_replays_delivered", same_delivered);
  out.AddMetric("same_interval_notified_trials", same_notified);
  out.AddMetric("no_replay_notified_trials", control_notified);
  // Only meaningful if the relayed packets actually reached r.
  bool exercised = later_delivered == static_cast<size_t>(options.trials);
  out.verdict = later_notified == 0 && exercised ? Verdict::kDefended
                                                 : Verdict::kVulnerable;
  return out;
}

absl::StatusOr<ScenarioOutcome> AttackForeignUpload(const AttackOptions& options) {
  ScenarioOutcome out;
  out.scenario = "attack-foreign-upload";
  out.mode = std::string(ModeName(options.harness.mode));
  size_t raw_rejected = 0, ce_only_rejected = 0, fake_accepted = 0;
  size_t fake_notified = 0, control_notified = 0;
  for (int t = 0; t < options.trials; ++t) {
    uint64_t seed = DeriveSeed(options.harness.seed, t);
    HarnessOptions h = options.harness;
    h.seed = seed;
    sim::Scenario s = MustParse(
        "start = 2020-04-20T09:00:00.000Z\nduration_s = 600\nseed = " +
        std::to_string(seed) +
        "\nnode m 0:0,0 600:0,0\nnode b 0:2,0 600:2,0\nnode c 0:0,2 600:0,2\n");
    ASSIGN_OR_RETURN(World world, BuildWorld(s, h));
    Deployment& d = *world.deployment;
    int m = s.NodeIndex("m");

    std::set<TemporaryContactNumber> heard;
    for (const auto& rx : world.trace.rx) {
      if (rx.rx_node == m) heard.insert(rx.tcn);
    }
    ASSIGN_OR_RETURN(std::string tan, d.IssueTan(AuthorizationKind::kMedical));
    nlohmann::json raw = {{"tan", tan}, {"tcns", nlohmann::json::array()}};
    for (const auto& x : heard) raw["tcns"].push_back(x.Hex());
    raw_rejected += !d.api().ReportJson(raw).ok();
    nlohmann::json ce_only = {{"tan", tan}, {"ce_tcns", nlohmann::json::array()}};
    for (const auto& r : world.client("m").store().Records()) {
      ce_only["ce_tcns"].push_back(r.ce_tcn.Hex());
    }
    ce_only_rejected += !d.api().ReportJson(ce_only).ok();

    // Keys nobody ever broadcast under.
    SeededRandom rng(DeriveSeed(seed, 5));
    auto fake = d.api().Report({tan, RandomKeys(DateOf(d.clock().Now()), 14, rng), {}});
    fake_accepted += fake.ok();
    d.AdvanceAndSeal();
    bool any = false;
    for (const char* id : {"b", "c"}) {
      ASSIGN_OR_RETURN(auto match, d.Check(world.client(id)));
      any |= match.notified();
      RecordNotifications(id, "after-fake-keys", match, out.notifications);
    }
    fake_notified += any;

    // Control: the same device uploads its real keys.
    ASSIGN_OR_RETURN(std::string real_tan, d.IssueTan(AuthorizationKind::kMedical));
    RETURN_IF_ERROR(
        world.client("m").ReportInfection(d.api(), real_tan, d.clock().Now()).status());
    d.AdvanceAndSeal();
    bool both = true;
    for (const char* id : {"b", "c"}) {
      ASSIGN_OR_RETURN(auto match, d.Check(world.client(id)));
      both &= match.notified();
    }
    control_notified += both;
  }
  out.AddMetric("trials", static_cast<size_t>(options.trials));
  out.AddMetric("raw_tcn_uploads_rejected", raw_rejected);
  out.AddMetric("ce_tcn_only_uploads_rejected", ce_only_rejected);
  out.AddMetric("fake_key_uploads_accepted", fake_accepted);
  out.AddMetric("fake_key_notified_trials", fake_notified);
  out.AddMetric("real_key_control_notified_trials", control_notified);
  size_t trials = static_cast<size_t>(options.trials);
  out.verdict = raw_rejected == trials && ce_only_rejected == trials &&
                        fake_notified == 0
                    ? Verdict::kDefended
                    : Verdict::kVulnerable;
  return out;
}

absl::StatusOr<ScenarioOutcome> AttackSelfReport(const AttackOptions& options) {
  ScenarioOutcome out;
  out.scenario = "attack-self-report";
  out.mode = std::string(ModeName(options.harness.mode));
  HarnessOptions h = options.harness;
  sim::Scenario s = MustParse(
      "start = 2020-04-20T09:00:00.000Z\nduration_s = 600\nseed = " +
      std::to_string(h.seed) +
      "\nnode i 0:0,0 600:0,0\nnode e 0:2,0 600:2,0\nnode x 0:400,0 600:400,0\n");
  ASSIGN_OR_RETURN(World world, BuildWorld(s, h));
  Deployment& d = *world.deployment;
  TracingApi& api = d.api();
  UtcTime now = d.clock().Now();

  ASSIGN_OR_RETURN(std::string tan, d.IssueTan(AuthorizationKind::kMedical));
  RETURN_IF_ERROR(world.client("i").ReportInfection(api, tan, now).status());
  d.AdvanceAndSeal();
  now = d.clock().Now();

  ClientApp& x = world.client("x");
  auto keys = x.store().PrepareReport(store::RetentionPolicy::Default(), now);
  RETURN_IF_ERROR(keys.status());
  size_t attempts = 0, accepted = 0;
  for (const std::string& guess : {std::string(""), std::string("AAAAAAAAAAAA"),
                                   std::string("not-a-tan")}) {
    ++attempts;
    accepted += api.Report({guess, keys->keys, {}}).ok();
  }
  ++attempts;
  accepted += api.IssueTan(AuthorizationKind::kMedical, "self-issued").ok();
  ++attempts;
  accepted += api.IssueTan(AuthorizationKind::kSecondOrder, kHarnessCredential).ok();
  // x never met anyone who reported, so its honest proof must fail too.
  ++attempts;
  accepted += x.ProveContact(api, d.server().config().max_proof_responses).ok();

  SeededRandom rng(DeriveSeed(h.seed, 9));
  size_t forged_accepted = 0;
  constexpr size_t kPerChallenge = 100;
  for (size_t done = 0; done < options.forged_proofs;) {
    ASSIGN_OR_RETURN(auto challenge, api.ProofChallengeRequest());
    size_t n = std::min(kPerChallenge, options.forged_proofs - done);
    std::vector<ProofResponse> guesses(n);
    for (auto& g : guesses) RETURN_IF_ERROR(rng.Fill(g));
    forged_accepted += api.ProofResponseRequest(challenge.nonce_hex, guesses).ok();
    done += n;
  }

  ClientApp& e = world.client("e");
  bool control = false;
  auto auth = e.ProveContact(api, d.server().config().max_proof_responses);
  if (auth.ok() && auth->kind == AuthorizationKind::kSecondOrder) {
    control = e.ReportInfection(api, auth->tan, now).ok();
  }

  out.AddMetric("unauthorized_attempts", attempts);
  out.AddMetric("unauthorized_accepted", accepted);
  out.AddMetric("forged_proof_responses", options.forged_proofs);
  out.AddMetric("forged_proofs_accepted", forged_accepted);
  out.AddMetric("exposed_control_reported", std::string(control ? "yes" : "no"));
  out.verdict = accepted == 0 && forged_accepted == 0 ? Verdict::kDefended
                                                      : Verdict::kVulnerable;
  return out;
}

}  // namespace ctrace::harness
