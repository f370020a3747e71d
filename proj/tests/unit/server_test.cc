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
#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <unistd.h>

#include "ctrace/psi/psi_session.h"
#include "ctrace/server/http_frontend.h"
#include "ctrace/server/json_codec.h"
#include "ctrace/server/rate_limiter.h"
#include "ctrace/server/tracing_server.h"
#include "gtest/gtest.h"
#include "httplib.h"

namespace ctrace::server {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using tcn::ContactEventTcn;
using tcn::DailyKey;

const Date kDay = MakeDate(2020, 4, 20);
const UtcTime kNoon = MakeTime(kDay, 12, 0, 0);
constexpr char kCredential[] = "clinic-7";

ServerConfig TestConfig() {
  ServerConfig c;
  c.min_query = 8;
  c.medical_credentials = {kCredential};
  return c;
}

std::unique_ptr<TracingServer> MakeServer(ServerConfig config = TestConfig(),
                                          UtcTime now = kNoon,
                                          uint64_t seed = 1) {
  auto s = TracingServer::Create(std::move(config), now,
                                 std::make_unique<SeededRandom>(seed));
  EXPECT_TRUE(s.ok()) << s.status();
  return std::move(*s);
}

std::vector<DailyKey> KeysEndingOn(Date last, int days_count, uint64_t seed) {
  SeededRandom rng(seed);
  std::vector<DailyKey> keys;
  for (int i = days_count - 1; i >= 0; --i) {
    keys.push_back(*tcn::GenerateDailyKey(last - days(i), rng));
  }
  return keys;
}

std::vector<ContactEventTcn> Regenerate(const std::vector<DailyKey>& keys) {
  std::vector<ContactEventTcn> out;
  for (const auto& k : keys) {
    for (const auto& e : tcn::RegenerateDayTcns(k)) out.push_back(e.ce_tcn);
  }
  return out;
}

std::string Tan(TracingServer& s, UtcTime now = kNoon) {
  auto auth = s.IssueTan(AuthorizationKind::kMedical, kCredential, now);
  EXPECT_TRUE(auth.ok()) << auth.status();
  return auth->tan;
}

std::string TempPath(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() /
           (name + "." + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p.string();
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

TEST(RateLimiterTest, TwelvePerDayThenRetryAfter) {
  RateLimiter limiter(12, hours(24));
  for (int i = 0; i < 12; ++i) {
    EXPECT_TRUE(limiter.Acquire("c1", kNoon + minutes(i)).allowed);
  }
  auto d = limiter.Acquire("c1", kNoon + minutes(30));
  EXPECT_FALSE(d.allowed);
  // Oldest event at kNoon ages out at kNoon + 24 h.
  EXPECT_EQ(d.retry_after, hours(24) - minutes(30));
  EXPECT_TRUE(limiter.Acquire("c2", kNoon).allowed);
  EXPECT_TRUE(limiter.Acquire("c1", kNoon + hours(24)).allowed);
  EXPECT_FALSE(limiter.Acquire("c1", kNoon + hours(24)).allowed);
}

TEST(RateLimiterTest, MatchesSlidingWindowOracle) {
  SeededRandom rng(3);
  RateLimiter limiter(5, hours(1));
  std::vector<UtcTime> accepted;
  UtcTime t = kNoon;
  for (int i = 0; i < 2000; ++i) {
    t += std::chrono::seconds(rng.Uniform(900));
    size_t live = std::count_if(accepted.begin(), accepted.end(),
                                [&](UtcTime a) { return a + hours(1) > t; });
    bool want = live < 5;
    ASSERT_EQ(limiter.Acquire("x", t).allowed, want) << i;
    if (want) accepted.push_back(t);
  }
}

TEST(RateLimiterTest, ZeroDisables) {
  RateLimiter limiter(0, hours(24));
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(limiter.Acquire("c", kNoon).allowed);
}

TEST(TanTest, IssueRequiresCredentialAndIsAlphanumeric) {
  auto server = MakeServer();
  auto auth = server->IssueTan(AuthorizationKind::kMedical, kCredential, kNoon);
  ASSERT_TRUE(auth.ok());
  EXPECT_EQ(auth->tan.size(), 12u);
  EXPECT_TRUE(std::all_of(auth->tan.begin(), auth->tan.end(),
                          [](char c) { return std::isalnum(c); }));
  EXPECT_EQ(server->IssueTan(AuthorizationKind::kMedical, "nope", kNoon)
                .status()
                .code(),
            absl::StatusCode::kUnauthenticated);
  EXPECT_EQ(server->IssueTan(AuthorizationKind::kSecondOrder, kCredential, kNoon)
                .status()
                .code(),
            absl::StatusCode::kPermissionDenied);
}

TEST(TanTest, SingleUseAndExpiry) {
  auto server = MakeServer();
  std::string tan = Tan(*server);
  ReportRequest r{tan, KeysEndingOn(kDay, 1, 1), {}};
  ASSERT_TRUE(server->AcceptReport(r, kNoon).ok());
  EXPECT_EQ(server->AcceptReport(r, kNoon).status().code(),
            absl::StatusCode::kUnauthenticated);

  std::string late = Tan(*server);
  ReportRequest r2{late, KeysEndingOn(kDay + days(1), 1, 2), {}};
  EXPECT_FALSE(server->AcceptReport(r2, kNoon + hours(25)).ok());
  std::string ok = Tan(*server);
  ReportRequest r3{ok, KeysEndingOn(kDay, 1, 3), {}};
  EXPECT_TRUE(server->AcceptReport(r3, kNoon + hours(23)).ok());
}

TEST(ReportTest, FourteenKeysEnqueue2016) {
  auto server = MakeServer();
  auto n = server->AcceptReport({Tan(*server), KeysEndingOn(kDay, 14, 4), {}},
                                kNoon);
  ASSERT_TRUE(n.ok());
  EXPECT_EQ(*n, 14u * 144u);
  EXPECT_EQ(server->open_entry_count(), 2016u);
}

TEST(ReportTest, RejectsMalformedReports) {
  auto server = MakeServer();
  std::string tan = Tan(*server);
  EXPECT_EQ(server->AcceptReport({tan, {}, {}}, kNoon).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(server->AcceptReport({tan, KeysEndingOn(kDay, 15, 5), {}}, kNoon).ok());
  EXPECT_FALSE(
      server->AcceptReport({tan, KeysEndingOn(kDay + days(2), 1, 6), {}}, kNoon).ok());
  auto dup = KeysEndingOn(kDay, 1, 7);
  dup.push_back(KeysEndingOn(kDay, 1, 8)[0]);
  EXPECT_FALSE(server->AcceptReport({tan, dup, {}}, kNoon).ok());
  // None of the failures consumed the TAN.
  EXPECT_TRUE(server->AcceptReport({tan, KeysEndingOn(kDay, 2, 9), {}}, kNoon).ok());
}

TEST(ReportTest, MedicalUploadWithPrecomputedSet) {
  auto server = MakeServer();
  auto keys = KeysEndingOn(kDay, 3, 10);
  auto ces = Regenerate(keys);
  std::reverse(ces.begin(), ces.end());
  EXPECT_TRUE(server->AcceptReport({Tan(*server), keys, ces}, kNoon).ok());
  ces.pop_back();
  EXPECT_FALSE(server->AcceptReport({Tan(*server), keys, ces}, kNoon).ok());
}

TEST(BatchTest, SealShufflesAcrossReporters) {
  auto server = MakeServer();
  auto a = KeysEndingOn(kDay, 14, 11);
  auto b = KeysEndingOn(kDay, 14, 12);
  ASSERT_TRUE(server->AcceptReport({Tan(*server), a, {}}, kNoon).ok());
  ASSERT_TRUE(server->AcceptReport({Tan(*server), b, {}}, kNoon).ok());
  auto batch = server->SealNow(kNoon);
  ASSERT_NE(batch, nullptr);
  ASSERT_EQ(batch->entries.size(), 4032u);
  EXPECT_TRUE(std::is_sorted(batch->entries.begin(), batch->entries.end()));

  auto from_a = Regenerate(a);
  std::set<ContactEventTcn> a_set(from_a.begin(), from_a.end());
  // Runs of consecutive same-reporter entries. For a random interleaving of
  // two sets of n the count has mean n + 1 and sd about sqrt(n / 2).
  size_t runs = 1, longest = 1, current = 1;
  for (size_t i = 1; i < batch->entries.size(); ++i) {
    bool same = a_set.contains(batch->entries[i].ce_tcn) ==
                a_set.contains(batch->entries[i - 1].ce_tcn);
    current = same ? current + 1 : 1;
    runs += !same;
    longest = std::max(longest, current);
  }
  double mean = 2017, sd = std::sqrt(2016.0 / 2);
  EXPECT_NEAR(runs, mean, 5 * sd);
  EXPECT_LT(longest, 30u);
}

TEST(BatchTest, EmptyHoursAreSealedAndBatchesAreImmutable) {
  auto server = MakeServer();
  uint64_t first = server->open_batch_id();
  auto sealed = server->Tick(kNoon + hours(3) + minutes(5));
  ASSERT_EQ(sealed.size(), 3u);
  for (const auto& b : sealed) EXPECT_TRUE(b->entries.empty());
  EXPECT_EQ(sealed[1]->sealed_at, kNoon + hours(2));
  BatchEntry e{Regenerate(KeysEndingOn(kDay, 1, 13))[0], OrderTag::kFirstOrder};
  EXPECT_EQ(server->AddEntries(first, std::span(&e, 1)).code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(server->AddEntries(server->open_batch_id(), std::span(&e, 1)).ok());
  EXPECT_TRUE(server->Tick(kNoon + hours(3) + minutes(30)).empty());
}

TEST(BatchTest, ReleaseContract) {
  auto server = MakeServer();
  for (int i = 0; i < 3; ++i) {
    ASSERT_TRUE(server->AcceptReport({Tan(*server), KeysEndingOn(kDay, 1, 20 + i), {}},
                                     kNoon).ok());
    server->SealNow(kNoon);
  }
  auto all = server->ReleaseBatches(0, ReleaseMode::kDirect);
  ASSERT_EQ(all.size(), 3u);
  EXPECT_TRUE(server->ReleaseBatches(all.back().batch_id, ReleaseMode::kDirect).empty());
  for (const auto& s : all) {
    EXPECT_EQ(s.first_order.size(), 144u);
    EXPECT_TRUE(std::is_sorted(s.first_order.begin(), s.first_order.end()));
    EXPECT_TRUE(s.first_order_filter.empty());
    auto j = codec::SummaryToJson(s);
    std::set<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.insert(it.key());
    EXPECT_EQ(keys, (std::set<std::string>{"batch_id", "sealed_at", "entry_count",
                                           "first_order", "second_order"}));
  }
  auto psi = server->ReleaseBatches(0, ReleaseMode::kPsi);
  ASSERT_EQ(psi.size(), 3u);
  EXPECT_TRUE(psi[0].first_order.empty());
  auto filter = psi::BloomFilter::Decode(psi[0].first_order_filter);
  ASSERT_TRUE(filter.ok());
  EXPECT_EQ(*filter, server->Batch(psi[0].batch_id)->first_order_filter);
}

TEST(BatchTest, EveryAcceptedEntryLandsInExactlyOneBatch) {
  auto server = MakeServer();
  SeededRandom rng(30);
  std::multiset<ContactEventTcn> accepted;
  UtcTime t = kNoon;
  for (int i = 0; i < 8; ++i) {
    auto keys = KeysEndingOn(DateOf(t), 1 + rng.Uniform(2), 100 + i);
    for (const auto& ce : Regenerate(keys)) accepted.insert(ce);
    ASSERT_TRUE(server->AcceptReport({Tan(*server, t), keys, {}}, t).ok());
    t += minutes(20 + rng.Uniform(60));
    server->Tick(t);
  }
  server->Tick(t + hours(2));
  std::multiset<ContactEventTcn> released;
  for (const auto& s : server->ReleaseBatches(0, ReleaseMode::kDirect)) {
    released.insert(s.first_order.begin(), s.first_order.end());
  }
  EXPECT_EQ(released, accepted);
}

TEST(ProofTest, GenuineContactEarnsSecondOrderTan) {
  auto server = MakeServer();
  auto keys = KeysEndingOn(kDay, 1, 40);
  ASSERT_TRUE(server->AcceptReport({Tan(*server), keys, {}}, kNoon).ok());
  server->SealNow(kNoon);
  ContactEventTcn held = Regenerate(keys)[77];

  auto c = server->IssueProofChallenge(kNoon);
  Bytes nonce = *HexDecode(c.nonce_hex);
  std::vector<ProofResponse> responses = {
      ComputeProofResponse(Regenerate(KeysEndingOn(kDay, 1, 41))[0], nonce),
      ComputeProofResponse(held, nonce)};
  auto auth = server->VerifyContactProof(c.nonce_hex, responses, kNoon);
  ASSERT_TRUE(auth.ok()) << auth.status();
  EXPECT_EQ(auth->kind, AuthorizationKind::kSecondOrder);
  // Replaying the same transcript fails.
  EXPECT_FALSE(server->VerifyContactProof(c.nonce_hex, responses, kNoon).ok());

  // The second-order report is tagged as such.
  ASSERT_TRUE(server->AcceptReport({auth->tan, KeysEndingOn(kDay, 2, 42), {}},
                                   kNoon).ok());
  auto batch = server->SealNow(kNoon);
  EXPECT_EQ(batch->CountOf(OrderTag::kSecondOrder), 288u);
  EXPECT_EQ(batch->CountOf(OrderTag::kFirstOrder), 0u);
}

TEST(ProofTest, ForgedResponsesAreRejected) {
  auto server = MakeServer();
  ASSERT_TRUE(server->AcceptReport({Tan(*server), KeysEndingOn(kDay, 1, 43), {}},
                                   kNoon).ok());
  server->SealNow(kNoon);
  SeededRandom rng(44);
  for (int i = 0; i < 200; ++i) {
    auto c = server->IssueProofChallenge(kNoon);
    ProofResponse guess;
    ASSERT_TRUE(rng.Fill(guess).ok());
    ASSERT_EQ(server->VerifyContactProof(c.nonce_hex, std::span(&guess, 1), kNoon)
                  .status()
                  .code(),
              absl::StatusCode::kPermissionDenied);
  }
  ProofResponse any{};
  EXPECT_FALSE(server->VerifyContactProof(std::string(64, 'a'), std::span(&any, 1),
                                          kNoon).ok());
  auto c = server->IssueProofChallenge(kNoon);
  EXPECT_FALSE(server->VerifyContactProof(c.nonce_hex, std::span(&any, 1),
                                          kNoon + hours(1)).ok());
}

TEST(PurgeTest, BoundaryAtWindow) {
  for (int age : {13, 14, 15}) {
    auto server = MakeServer(TestConfig(), kNoon - days(age));
    server->SealNow(kNoon - days(age));
    server->PurgeBatches(kNoon);
    EXPECT_EQ(server->BatchIds().size(), age <= 14 ? 1u : 0u) << age;
  }
}

TEST(PurgeTest, LogHoldsNothingOlderThanWindow) {
  std::string path = TempPath("ctrace_purge.log");
  auto config = TestConfig();
  config.log_path = path;
  auto old_keys = KeysEndingOn(kDay - days(15), 1, 50);
  auto server = MakeServer(config, kNoon - days(15));
  ASSERT_TRUE(server->AcceptReport({Tan(*server, kNoon - days(15)), old_keys, {}},
                                   kNoon - days(15)).ok());
  server->SealNow(kNoon - days(15));
  ASSERT_TRUE(server->AcceptReport({Tan(*server, kNoon), KeysEndingOn(kDay, 1, 51), {}},
                                   kNoon).ok());
  server->SealNow(kNoon);
  std::string before = Slurp(path);
  std::string probe = Regenerate(old_keys)[0].Hex();
  EXPECT_NE(before.find(probe), std::string::npos);
  server->PurgeBatches(kNoon);
  std::string after = Slurp(path);
  EXPECT_EQ(after.find(probe), std::string::npos);
  EXPECT_EQ(server->BatchIds().size(), 1u);
  std::filesystem::remove(path);
}

TEST(PersistenceTest, KeysNeverReachStorage) {
  std::string path = TempPath("ctrace_keys.log");
  auto config = TestConfig();
  config.log_path = path;
  auto server = MakeServer(config);
  auto keys = KeysEndingOn(kDay, 14, 60);
  ASSERT_TRUE(server->AcceptReport({Tan(*server), keys, {}}, kNoon).ok());
  server->SealNow(kNoon);
  server->PurgeBatches(kNoon);
  std::string stored = Slurp(path);
  ASSERT_FALSE(stored.empty());
  for (const auto& k : keys) {
    std::string raw(k.bytes().begin(), k.bytes().end());
    EXPECT_EQ(stored.find(k.Hex()), std::string::npos);
    EXPECT_EQ(stored.find(raw), std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST(PersistenceTest, RestartReopensUnsealedBatchAndKeepsSealedOnes) {
  std::string path = TempPath("ctrace_restart.log");
  auto config = TestConfig();
  config.log_path = path;
  auto first_keys = KeysEndingOn(kDay, 1, 70);
  auto second_keys = KeysEndingOn(kDay, 1, 71);
  std::string spare_tan;
  uint64_t sealed_id = 0;
  psi::BloomFilter sealed_filter = psi::BloomFilter::ForCapacity(0);
  {
    auto server = MakeServer(config);
    ASSERT_TRUE(server->AcceptReport({Tan(*server), first_keys, {}}, kNoon).ok());
    auto b = server->SealNow(kNoon);
    sealed_id = b->batch_id;
    sealed_filter = b->first_order_filter;
    ASSERT_TRUE(server->AcceptReport({Tan(*server), second_keys, {}}, kNoon).ok());
    spare_tan = Tan(*server);
    // Destroyed without sealing: a crash between enqueue and seal.
  }
  auto server = MakeServer(config, kNoon + minutes(5), 2);
  EXPECT_EQ(server->open_entry_count(), 144u);
  ASSERT_NE(server->Batch(sealed_id), nullptr);
  EXPECT_EQ(server->Batch(sealed_id)->first_order_filter, sealed_filter);
  EXPECT_GT(server->open_batch_id(), sealed_id);
  // Consumed TANs stay consumed, unused ones stay usable.
  EXPECT_TRUE(server->AcceptReport({spare_tan, KeysEndingOn(kDay, 1, 72), {}},
                                   kNoon + minutes(5)).ok());
  auto b = server->SealNow(kNoon + minutes(6));
  auto want = Regenerate(second_keys);
  for (const auto& ce : want) {
    EXPECT_TRUE(std::binary_search(b->entries.begin(), b->entries.end(),
                                   BatchEntry{ce, OrderTag::kFirstOrder}));
  }
  std::filesystem::remove(path);
}

TEST(ServerPsiTest, RoundTripMatchesOracleAndRefineOnce) {
  auto config = TestConfig();
  config.exact_filters = true;
  auto server = MakeServer(config);
  auto keys = KeysEndingOn(kDay, 1, 80);
  ASSERT_TRUE(server->AcceptReport({Tan(*server), keys, {}}, kNoon).ok());
  auto batch = server->SealNow(kNoon);
  auto infected = Regenerate(keys);

  SeededRandom rng(81);
  std::vector<ContactEventTcn> observed = {infected[3], infected[90]};
  for (const auto& ce : Regenerate(KeysEndingOn(kDay, 1, 82))) {
    if (observed.size() < 6) observed.push_back(ce);
  }
  auto client = *psi::PsiClientSession::Create(observed, 8, rng);
  auto sent = *client.Round1(rng);
  std::vector<uint64_t> ids = {batch->batch_id};
  auto reply = server->PsiRound1("client-a", ids, sent, kNoon);
  ASSERT_TRUE(reply.ok()) << reply.status();
  psi::BatchReply br{batch->batch_id, reply->per_batch[0],
                     {&*batch->exact_first_order, &batch->first_order_filter}};
  auto result = client.Finish(std::span(&br, 1));
  ASSERT_TRUE(result.ok());
  EXPECT_EQ(result->Hits(0, 0), 2u);
  EXPECT_GE(result->Hits(0, 1), 2u);

  auto follow = *psi::PsiClientSession::Create(
      std::vector<std::vector<ContactEventTcn>>{{infected[3]}, {observed[4]}}, 8, rng);
  auto groups = *follow.Round1(rng);
  EXPECT_TRUE(server->PsiRefine(reply->session_id, groups, kNoon).ok());
  EXPECT_EQ(server->PsiRefine(reply->session_id, groups, kNoon).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(ServerPsiTest, UndersizedQueryRejectedWithoutSpendingQuota) {
  auto server = MakeServer();
  auto batch = server->SealNow(kNoon);
  SeededRandom rng(83);
  std::vector<uint64_t> ids = {batch->batch_id};
  psi::ElementGroups tiny = {{psi::HashToGroup(Regenerate(KeysEndingOn(kDay, 1, 84))[0])}};
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(server->PsiRound1("c", ids, tiny, kNoon).status().code(),
              absl::StatusCode::kInvalidArgument);
  }
  EXPECT_TRUE(server->RateLimitCheck("c", kNoon).allowed);
  std::vector<uint64_t> missing = {999};
  auto client = *psi::PsiClientSession::Create(Regenerate(KeysEndingOn(kDay, 1, 85)), 8, rng);
  auto sent = *client.Round1(rng);
  EXPECT_EQ(server->PsiRound1("c", missing, sent, kNoon).status().code(),
            absl::StatusCode::kNotFound);
}

TEST(ServerPsiTest, ThirteenthSessionIsRateLimited) {
  auto server = MakeServer();
  auto batch = server->SealNow(kNoon);
  SeededRandom rng(86);
  std::vector<uint64_t> ids = {batch->batch_id};
  auto observed = Regenerate(KeysEndingOn(kDay, 1, 87));
  observed.resize(8);
  for (int i = 0; i < 12; ++i) {
    auto c = *psi::PsiClientSession::Create(observed, 8, rng);
    ASSERT_TRUE(server->PsiRound1("tok", ids, *c.Round1(rng), kNoon + minutes(i)).ok());
  }
  auto c = *psi::PsiClientSession::Create(observed, 8, rng);
  auto sent = *c.Round1(rng);
  auto denied = server->PsiRound1("tok", ids, sent, kNoon + hours(1));
  EXPECT_EQ(denied.status().code(), absl::StatusCode::kResourceExhausted);
  ASSERT_TRUE(RetryAfterOf(denied.status()).has_value());
  EXPECT_EQ(*RetryAfterOf(denied.status()), hours(23));
  EXPECT_TRUE(server->PsiRound1("tok", ids, sent, kNoon + hours(24)).ok());
}

TEST(ConcurrencyTest, ParallelReportsAndReads) {
  auto server = MakeServer();
  std::vector<std::string> tans;
  for (int i = 0; i < 8; ++i) tans.push_back(Tan(*server));
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      if (server->AcceptReport({tans[i], KeysEndingOn(kDay, 2, 200 + i), {}}, kNoon).ok()) {
        ++ok;
      }
    });
  }
  threads.emplace_back([&] {
    for (int i = 0; i < 50; ++i) (void)server->ReleaseBatches(0, ReleaseMode::kDirect);
  });
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 8);
  EXPECT_EQ(server->SealNow(kNoon)->entries.size(), 8u * 288u);
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    server_ = MakeServer();
    frontend_ = std::make_unique<HttpFrontend>(*server_, [] { return kNoon; });
    auto port = frontend_->Start("127.0.0.1", 0);
    ASSERT_TRUE(port.ok());
    client_ = std::make_unique<httplib::Client>("127.0.0.1", *port);
  }
  void TearDown() override { frontend_->Stop(); }

  std::unique_ptr<TracingServer> server_;
  std::unique_ptr<HttpFrontend> frontend_;
  std::unique_ptr<httplib::Client> client_;
};

TEST_F(HttpTest, HealthAndTan) {
  auto health = client_->Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto no_cred = client_->Post("/v1/tan", "{}", "application/json");
  ASSERT_TRUE(no_cred);
  EXPECT_EQ(no_cred->status, 401);
  auto body = nlohmann::json::parse(no_cred->body);
  EXPECT_EQ(body["code"], "UNAUTHENTICATED");
  EXPECT_TRUE(body.contains("message"));

  httplib::Headers h = {{"Authorization", std::string("Bearer ") + kCredential}};
  auto tan = client_->Post("/v1/tan", h, "{}", "application/json");
  ASSERT_TRUE(tan);
  EXPECT_EQ(tan->status, 200);
  EXPECT_EQ(nlohmann::json::parse(tan->body)["tan"].get<std::string>().size(), 12u);
}

TEST_F(HttpTest, RawTcnUploadRejectedKeysAccepted) {
  std::string tan = Tan(*server_);
  auto ces = Regenerate(KeysEndingOn(kDay, 1, 90));
  nlohmann::json raw = {{"tan", tan}, {"ce_tcns", {ces[0].Hex(), ces[1].Hex()}}};
  auto res = client_->Post("/v1/report", raw.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  nlohmann::json tcns = {{"tan", tan}, {"tcns", {"00112233445566778899aabbccddeeff"}}};
  res = client_->Post("/v1/report", tcns.dump(), "application/json");
  EXPECT_EQ(res->status, 400);
  res = client_->Post("/v1/report", "not json", "application/json");
  EXPECT_EQ(res->status, 400);

  ReportRequest good{tan, KeysEndingOn(kDay, 1, 91), {}};
  res = client_->Post("/v1/report", codec::ReportToJson(good).dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["accepted_ce_tcns"], 144);

  server_->SealNow(kNoon);
  res = client_->Get("/v1/batches?since=0&mode=direct");
  ASSERT_TRUE(res);
  auto batches = nlohmann::json::parse(res->body)["batches"];
  ASSERT_EQ(batches.size(), 1u);
  auto summary = codec::SummaryFromJson(batches[0]);
  ASSERT_TRUE(summary.ok());
  EXPECT_EQ(summary->first_order.size(), 144u);
  res = client_->Get("/v1/batches?since=0&mode=psi");
  summary = codec::SummaryFromJson(nlohmann::json::parse(res->body)["batches"][0]);
  ASSERT_TRUE(summary.ok());
  EXPECT_TRUE(psi::BloomFilter::Decode(summary->first_order_filter).ok());
  EXPECT_EQ(client_->Get("/v1/batches?mode=bogus")->status, 400);
}

TEST_F(HttpTest, PsiAndRateLimitOverTheWire) {
  auto batch = server_->SealNow(kNoon);
  SeededRandom rng(92);
  auto observed = Regenerate(KeysEndingOn(kDay, 1, 93));
  observed.resize(8);
  for (int i = 0; i < 13; ++i) {
    auto c = *psi::PsiClientSession::Create(observed, 8, rng);
    auto sent = *c.Round1(rng);
    nlohmann::json req = {{"client_token", "t"},
                          {"batch_ids", {batch->batch_id}},
                          {"elements", codec::GroupToJson(sent[0])}};
    auto res = client_->Post("/v1/psi/round1", req.dump(), "application/json");
    ASSERT_TRUE(res);
    if (i < 12) {
      ASSERT_EQ(res->status, 200) << res->body;
      auto reply = codec::PsiReplyFromJson(nlohmann::json::parse(res->body));
      ASSERT_TRUE(reply.ok());
      EXPECT_EQ(reply->per_batch[0][0].size(), 8u);
    } else {
      EXPECT_EQ(res->status, 429);
      auto body = nlohmann::json::parse(res->body);
      EXPECT_EQ(body["retry_after"], 24 * 3600);
      EXPECT_EQ(res->get_header_value("Retry-After"), std::to_string(24 * 3600));
    }
  }
}

TEST_F(HttpTest, ProofOverTheWire) {
  auto keys = KeysEndingOn(kDay, 1, 94);
  ASSERT_TRUE(server_->AcceptReport({Tan(*server_), keys, {}}, kNoon).ok());
  server_->SealNow(kNoon);
  auto res = client_->Post("/v1/proof/challenge", "", "application/json");
  ASSERT_TRUE(res);
  auto challenge = codec::ChallengeFromJson(nlohmann::json::parse(res->body));
  ASSERT_TRUE(challenge.ok());
  auto resp = ComputeProofResponse(Regenerate(keys)[5], *HexDecode(challenge->nonce_hex));
  nlohmann::json req = {{"nonce", challenge->nonce_hex}, {"responses", {HexEncode(resp)}}};
  res = client_->Post("/v1/proof/response", req.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200) << res->body;
  auto auth = codec::AuthorizationFromJson(nlohmann::json::parse(res->body));
  ASSERT_TRUE(auth.ok());
  EXPECT_EQ(auth->kind, AuthorizationKind::kSecondOrder);
  res = client_->Post("/v1/proof/response", req.dump(), "application/json");
  EXPECT_EQ(res->status, 403);
}

}  // namespace
}  // namespace ctrace::server
