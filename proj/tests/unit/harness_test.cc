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
#include <map>
#include <set>

#include "gtest/gtest.h"
#include "ctrace/harness/attacks.h"
#include "ctrace/harness/bench.h"
#include "ctrace/harness/e2e.h"
#include "ctrace/harness/outcome.h"

namespace ctrace::harness {
namespace {

using server::OrderTag;
using store::ExposureCategory;

sim::Scenario Parse(const std::string& text) {
  auto s = sim::ParseScenario(text);
  EXPECT_TRUE(s.ok()) << s.status();
  return *s;
}

HarnessOptions Options(ReleaseMode mode, uint64_t seed = 1) {
  HarnessOptions o;
  o.mode = mode;
  o.seed = seed;
  return o;
}

const char kMeeting[] =
    "start = 2020-04-20T09:00:00.000Z\nduration_s = 900\nseed = 4\n"
    "node a 0:0,0 900:0,0\nnode b 0:1,0 900:1,0\n"
    "node z 0:300,0 900:300,0\nreport a\n";

const char kChain[] =
    "start = 2020-04-20T09:00:00.000Z\nduration_s = 2700\nseed = 5\n"
    "node a 0:0,0 900:0,0\n"
    "node b 0:1,0 900:1,0 1800:200,0 2700:200,0\n"
    "node c 1800:201,0 2700:201,0\n"
    "report a\nsecond_order b\n";

// Plaintext oracle: regenerate the reporter's ceTCNs from its broadcast keys
// and intersect with what the receiver stored.
CategoryCounts OracleCounts(E2eRun& run, const std::string& reporter,
                            const std::string& receiver) {
  std::set<tcn::ContactEventTcn> published;
  // Keys seen on the air are the ones derived before the report rotated them.
  std::set<std::string> reporter_tcns;
  int r = run.world.scenario.NodeIndex(reporter);
  for (const auto& c : run.world.trace.identity_changes) {
    if (c.node == r) reporter_tcns.insert(c.tcn.Hex());
  }
  CategoryCounts counts;
  auto& store = run.world.client(receiver).store();
  auto classes = store.ClassifyExposures();
  for (const auto& rx : run.world.trace.rx) {
    if (rx.rx_node != run.world.scenario.NodeIndex(receiver) || rx.tx_node != r) continue;
    UtcTime at = run.world.trace.start + std::chrono::milliseconds(rx.time_us / 1000);
    auto ce = tcn::ComputeContactEventTcn(rx.tcn, DateOf(at), tcn::TinOf(at));
    published.insert(ce);
  }
  for (const auto& ce : published) counts[classes.at(ce)] += 1;
  EXPECT_FALSE(reporter_tcns.empty());
  return counts;
}

TEST(E2e, MeetingNotifiesContactHighInBothModes) {
  for (ReleaseMode mode : {ReleaseMode::kDirect, ReleaseMode::kPsi}) {
    auto run = RunE2e(Parse(kMeeting), Options(mode));
    ASSERT_TRUE(run.ok()) << run.status();
    CategoryCounts oracle = OracleCounts(*run, "a", "b");
    EXPECT_EQ(oracle[ExposureCategory::kHigh], 1u);
    ASSERT_EQ(run->outcome.notifications.size(), 1u) << run->outcome.FormatTable();
    const Notification& n = run->outcome.notifications[0];
    EXPECT_EQ(n.node, "b");
    EXPECT_EQ(n.order, OrderTag::kFirstOrder);
    EXPECT_EQ(n.counts, oracle) << ModeName(mode);
    size_t total = 0;
    for (const auto& [c, k] : oracle) total += k;
    EXPECT_EQ(n.total, total);
    EXPECT_EQ(run->outcome.CountFor("z", OrderTag::kFirstOrder), 0u);
  }
}

TEST(E2e, NoEncountersNoNotifications) {
  auto run = RunE2e(Parse("duration_s = 300\nnode a 0:0,0 300:0,0\n"
                          "node b 0:500,0 300:500,0\nreport a\n"),
                    Options(ReleaseMode::kPsi));
  ASSERT_TRUE(run.ok()) << run.status();
  EXPECT_TRUE(run->outcome.notifications.empty());
}

TEST(E2e, SecondOrderChainNotifiesOnlyAfterProof) {
  for (ReleaseMode mode : {ReleaseMode::kDirect, ReleaseMode::kPsi}) {
    auto run = RunE2e(Parse(kChain), Options(mode, 9));
    ASSERT_TRUE(run.ok()) << run.status();
    const auto& notes = run->outcome.notifications;
    bool b_first = false, c_second_after = false;
    for (const auto& n : notes) {
      if (n.node == "c") {
        EXPECT_EQ(n.phase, "after-second-order-report") << ModeName(mode);
        EXPECT_EQ(n.order, OrderTag::kSecondOrder);
        c_second_after = true;
      }
      if (n.node == "b" && n.order == OrderTag::kFirstOrder) b_first = true;
    }
    EXPECT_TRUE(b_first) << run->outcome.FormatTable();
    EXPECT_TRUE(c_second_after) << run->outcome.FormatTable();
    EXPECT_EQ(run->outcome.FindMetric("contact_proofs_accepted")->value, "1");
  }
}

TEST(E2e, DirectAndPsiAgreeOnWhoIsNotified) {
  const std::string crowd =
      "duration_s = 1200\nseed = 31\n"
      "node a 0:0,0 1200:0,0\nnode b 0:5,0 600:5,0 900:100,0 1200:100,0\n"
      "node c 0:50,0 1200:50,0\nnode d 0:95,0 1200:95,0\n"
      "node e 0:400,0 1200:400,0\nreport a\nreport d\n";
  std::map<std::string, std::set<std::string>> notified;
  for (ReleaseMode mode : {ReleaseMode::kDirect, ReleaseMode::kPsi}) {
    auto run = RunE2e(Parse(crowd), Options(mode, 3));
    ASSERT_TRUE(run.ok()) << run.status();
    for (const auto& n : run->outcome.notifications) {
      notified[std::string(ModeName(mode))].insert(n.node);
    }
  }
  EXPECT_EQ(notified["direct"], notified["psi"]);
  EXPECT_TRUE(notified["direct"].count("b"));
  EXPECT_FALSE(notified["direct"].count("e"));
}

TEST(E2e, SameSeedsSameTraceAndOutcome) {
  auto first = RunE2e(Parse(kChain), Options(ReleaseMode::kDirect, 12));
  auto second = RunE2e(Parse(kChain), Options(ReleaseMode::kDirect, 12));
  ASSERT_TRUE(first.ok() && second.ok());
  EXPECT_EQ(first->world.trace_text, second->world.trace_text);
  EXPECT_EQ(first->outcome.ToJson().dump(), second->outcome.ToJson().dump());
}

TEST(E2e, RunsOverHttp) {
  HarnessOptions o = Options(ReleaseMode::kPsi, 2);
  o.transport = Transport::kHttp;
  auto run = RunE2e(Parse(kMeeting), o);
  ASSERT_TRUE(run.ok()) << run.status();
  EXPECT_EQ(run->outcome.CountFor("b", OrderTag::kFirstOrder),
            run->outcome.notifications.at(0).total);
  EXPECT_GT(run->outcome.notifications.at(0).counts[ExposureCategory::kHigh], 0u);
}

TEST(E2e, UnknownReporterIsAnError) {
  sim::Scenario s = Parse("node a 0:0,0 10:0,0\n");
  s.reporters.push_back("ghost");
  EXPECT_EQ(RunE2e(s, Options(ReleaseMode::kDirect)).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(Attacks, RebroadcastAcrossIntervalsNeverNotifies) {
  AttackOptions o;
  o.harness = Options(ReleaseMode::kDirect, 5);
  o.trials = 4;
  auto out = AttackRebroadcast(o);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->verdict, Verdict::kDefended) << out->FormatTable();
  EXPECT_EQ(out->FindMetric("later_interval_notified_trials")->value, "0");
  EXPECT_EQ(out->FindMetric("later_interval_replays_delivered")->value, "4");
  EXPECT_EQ(out->FindMetric("same_interval_notified_trials")->value, "4");
  EXPECT_EQ(out->FindMetric("no_replay_notified_trials")->value, "0");
}

TEST(Attacks, ForeignUploadRejectedOverHttp) {
  AttackOptions o;
  o.harness = Options(ReleaseMode::kPsi, 6);
  o.harness.transport = Transport::kHttp;
  o.trials = 2;
  auto out = AttackForeignUpload(o);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->verdict, Verdict::kDefended) << out->FormatTable();
  EXPECT_EQ(out->FindMetric("raw_tcn_uploads_rejected")->value, "2");
  EXPECT_EQ(out->FindMetric("fake_key_uploads_accepted")->value, "2");
  EXPECT_EQ(out->FindMetric("real_key_control_notified_trials")->value, "2");
}

TEST(Attacks, SelfReportPathsRejected) {
  AttackOptions o;
  o.harness = Options(ReleaseMode::kDirect, 7);
  o.forged_proofs = 1000;
  auto out = AttackSelfReport(o);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->verdict, Verdict::kDefended) << out->FormatTable();
  EXPECT_EQ(out->FindMetric("forged_proofs_accepted")->value, "0");
  EXPECT_EQ(out->FindMetric("exposed_control_reported")->value, "yes");
}

TEST(Attacks, LinkageDirectModeIsVulnerable) {
  AttackOptions o;
  o.harness = Options(ReleaseMode::kDirect, 8);
  o.trials = 3;
  auto out = AttackLinkage(o);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->verdict, Verdict::kVulnerable);
  EXPECT_EQ(out->FindMetric("identified_trials")->value, "3");
}

TEST(Attacks, LinkagePsiModeFollowsCountingModel) {
  AttackOptions o;
  o.harness = Options(ReleaseMode::kPsi, 9);
  o.trials = 1;
  auto out = AttackLinkage(o);
  ASSERT_TRUE(out.ok()) << out.status();
  EXPECT_EQ(out->verdict, Verdict::kDefended) << out->FormatTable();
  EXPECT_EQ(out->FindMetric("model_isolated_trials")->value, "0");
  EXPECT_EQ(out->FindMetric("best_identification_probability")->value, "0.01");
  EXPECT_EQ(out->FindMetric("unpadded_small_query_rejected")->value, "1");
  // Bisection padded by the client fits in ten sessions.
  EXPECT_EQ(out->FindMetric("adaptive_sessions_needed")->value, "10");

  o.harness.server.psi_sessions_per_window = 0;
  auto control = AttackLinkage(o);
  ASSERT_TRUE(control.ok()) << control.status();
  EXPECT_EQ(control->verdict, Verdict::kVulnerable) << control->FormatTable();
}

TEST(Bench, RowsAreCorrectAndRespondIsLinear) {
  auto report = BenchPsi({100, 200, 400}, 1);
  ASSERT_TRUE(report.ok()) << report.status();
  ASSERT_EQ(report->rows.size(), 3u);
  for (const auto& r : report->rows) EXPECT_TRUE(r.correct()) << r.size;
  EXPECT_GT(report->respond_r2, 0.95) << report->FormatTable();
  EXPECT_NE(report->FormatTable().find("server_respond_ms"), std::string::npos);
  auto empty = BenchPsi({}, 1);
  ASSERT_TRUE(empty.ok());
  EXPECT_TRUE(empty->rows.empty());
}

TEST(Bench, LinearFitMatchesHandComputation) {
  double slope = 0;
  EXPECT_DOUBLE_EQ(LinearFitR2({1, 2, 3}, {2, 4, 6}, &slope), 1.0);
  EXPECT_DOUBLE_EQ(slope, 2.0);
  // y = (1, 3, 2): slope 0.5, r^2 = 0.25.
  EXPECT_NEAR(LinearFitR2({1, 2, 3}, {1, 3, 2}, &slope), 0.25, 1e-12);
  EXPECT_NEAR(slope, 0.5, 1e-12);
}

TEST(Outcome, JsonAndTableShape) {
  ScenarioOutcome o;
  o.scenario = "x";
  o.mode = "psi";
  o.verdict = Verdict::kDefended;
  o.notifications.push_back({"b", OrderTag::kSecondOrder,
                             {{ExposureCategory::kHigh, 2}}, 2, "p"});
  o.AddMetric("m", size_t{3});
  auto j = o.ToJson();
  EXPECT_EQ(j["verdict"], "DEFENDED");
  EXPECT_EQ(j["notifications"][0]["order"], "SECOND_ORDER");
  EXPECT_EQ(j["notifications"][0]["categories"]["HIGH"], 2);
  EXPECT_EQ(j["metrics"]["m"], "3");
  std::string table = o.FormatTable();
  EXPECT_NE(table.find("HIGH=2"), std::string::npos);
  EXPECT_EQ(o.CountFor("b", OrderTag::kSecondOrder), 2u);
}

}  // namespace
}  // namespace ctrace::harness
