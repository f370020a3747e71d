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
#ifndef CTRACE_SERVER_TRACING_SERVER_H_
#define CTRACE_SERVER_TRACING_SERVER_H_

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/common/time.h"
#include "ctrace/psi/bloom_filter.h"
#include "ctrace/psi/commutative_key.h"
#include "ctrace/psi/psi_session.h"
#include "ctrace/server/rate_limiter.h"
#include "ctrace/server/server_log.h"
#include "ctrace/server/tan_registry.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::server {

enum class OrderTag { kFirstOrder, kSecondOrder };

std::string_view OrderTagName(OrderTag tag);
absl::StatusOr<OrderTag> ParseOrderTag(std::string_view name);

struct BatchEntry {
  tcn::ContactEventTcn ce_tcn;
  OrderTag order = OrderTag::kFirstOrder;

  auto operator<=>(const BatchEntry&) const = default;
};

struct InfectedBatch {
  uint64_t batch_id = 0;
  UtcTime sealed_at;
  std::vector<BatchEntry> entries;  // ascending by ceTCN bytes
  std::shared_ptr<const psi::CommutativeKey> key;
  // Filters over the encrypted entries, one per order tag.
  psi::BloomFilter first_order_filter = psi::BloomFilter::ForCapacity(0);
  psi::BloomFilter second_order_filter = psi::BloomFilter::ForCapacity(0);
  // Only built when ServerConfig::exact_filters is set.
  std::optional<psi::ExactSetFilter> exact_first_order;
  std::optional<psi::ExactSetFilter> exact_second_order;

  size_t CountOf(OrderTag tag) const;
};

enum class ReleaseMode { kDirect, kPsi };

// What clients download for one sealed batch. Direct mode fills the sorted
// ceTCN lists, PSI mode the encoded filters.
struct BatchSummary {
  uint64_t batch_id = 0;
  UtcTime sealed_at;
  size_t entry_count = 0;
  std::vector<tcn::ContactEventTcn> first_order;
  std::vector<tcn::ContactEventTcn> second_order;
  Bytes first_order_filter;
  Bytes second_order_filter;
};

struct ServerConfig {
  int window_days = 14;
  size_t min_query = psi::kDefaultMinQuery;
  // PSI sessions allowed per client token and rate window; <= 0 disables.
  int psi_sessions_per_window = 12;
  std::chrono::milliseconds rate_window = std::chrono::hours(24);
  std::chrono::milliseconds batch_period = std::chrono::hours(1);
  std::chrono::milliseconds tan_validity = kDefaultTanValidity;
  std::chrono::milliseconds challenge_validity = std::chrono::minutes(10);
  std::chrono::milliseconds psi_session_ttl = std::chrono::hours(1);
  size_t max_followup_groups = 4;
  size_t max_proof_responses = 20000;
  size_t max_batches_per_query = 512;
  int bloom_hash_count = psi::BloomFilter::kDefaultHashCount;
  std::vector<std::string> medical_credentials;
  bool exact_filters = false;
  // Empty keeps everything in memory.
  std::string log_path;
};

struct ReportRequest {
  std::string tan;
  std::vector<tcn::DailyKey> keys;
  // Optional: ceTCNs the uploader regenerated itself. Must equal the set the
  // server regenerates from keys.
  std::vector<tcn::ContactEventTcn> ce_tcns;
};

struct PsiReply {
  uint64_t session_id = 0;
  std::vector<uint64_t> batch_ids;
  std::vector<psi::ElementGroups> per_batch;
};

struct ProofChallenge {
  std::string nonce_hex;
  UtcTime expires_at;
};

using ProofResponse = std::array<uint8_t, 32>;

// HMAC-SHA256 keyed with the ceTCN over the nonce bytes.
ProofResponse ComputeProofResponse(const tcn::ContactEventTcn& ce_tcn,
                                   std::span<const uint8_t> nonce);

// Rate-limit rejections carry the wait time as a status payload.
std::optional<std::chrono::milliseconds> RetryAfterOf(const absl::Status& s);
absl::Status RateLimited(std::chrono::milliseconds retry_after);
absl::Status WithRetryAfter(absl::Status status,
                            std::chrono::milliseconds retry_after);

class TracingServer {
 public:
  static absl::StatusOr<std::unique_ptr<TracingServer>> Create(
      ServerConfig config, UtcTime now, std::unique_ptr<RandomSource> rng);
  ~TracingServer();

  absl::StatusOr<UploadAuthorization> IssueTan(AuthorizationKind kind,
                                               std::string_view credential,
                                               UtcTime now);

  // Verifies the keys by regenerating all 144 ceTCNs per day, queues them
  // for the open batch and forgets the keys. Returns the number queued.
  absl::StatusOr<size_t> AcceptReport(const ReportRequest& report,
                                      UtcTime now);

  // Only the open batch accepts entries.
  absl::Status AddEntries(uint64_t batch_id,
                          std::span<const BatchEntry> entries);
  uint64_t open_batch_id() const;
  size_t open_entry_count() const;

  // Seals every batch period that has ended by now, including empty ones.
  std::vector<std::shared_ptr<const InfectedBatch>> Tick(UtcTime now);
  std::shared_ptr<const InfectedBatch> SealNow(UtcTime now);

  std::vector<BatchSummary> ReleaseBatches(uint64_t since,
                                           ReleaseMode mode) const;
  std::shared_ptr<const InfectedBatch> Batch(uint64_t batch_id) const;
  std::vector<uint64_t> BatchIds() const;

  // Round one takes exactly one group and consumes one rate-limit slot.
  absl::StatusOr<PsiReply> PsiRound1(const std::string& client_token,
                                     std::span<const uint64_t> batch_ids,
                                     const psi::ElementGroups& groups,
                                     UtcTime now);
  // One follow-up per session against the same batches.
  absl::StatusOr<PsiReply> PsiRefine(uint64_t session_id,
                                     const psi::ElementGroups& groups,
                                     UtcTime now);

  ProofChallenge IssueProofChallenge(UtcTime now);
  // Accepts when any response matches a first-order ceTCN still within the
  // retention window. Nonces are single use either way.
  absl::StatusOr<UploadAuthorization> VerifyContactProof(
      std::string_view nonce_hex, std::span<const ProofResponse> responses,
      UtcTime now);

  // Drops batches sealed before the retention window and expired TANs.
  size_t PurgeBatches(UtcTime now);

  RateDecision RateLimitCheck(const std::string& client_token,
                              UtcTime now) const;

  const ServerConfig& config() const { return config_; }

 private:
  struct PsiSessionState {
    std::unique_ptr<psi::PsiServerSession> session;
    std::vector<uint64_t> batch_ids;
    UtcTime created_at;
  };

  TracingServer(ServerConfig config, UtcTime now,
                std::unique_ptr<RandomSource> rng,
                std::unique_ptr<ServerLog> log);

  absl::Status Replay(const std::vector<nlohmann::json>& records);
  std::shared_ptr<const InfectedBatch> BuildBatch(
      uint64_t batch_id, UtcTime sealed_at, std::vector<BatchEntry> entries,
      std::shared_ptr<const psi::CommutativeKey> key) const;
  std::shared_ptr<const InfectedBatch> SealLocked(UtcTime sealed_at);
  absl::Status Compact();
  void LogOrWarn(const nlohmann::json& record);

  ServerConfig config_;
  std::unique_ptr<RandomSource> rng_;
  std::unique_ptr<ServerLog> log_;
  TanRegistry tans_;
  RateLimiter limiter_;

  mutable std::shared_mutex mu_;
  uint64_t open_batch_id_ = 1;
  UtcTime open_since_;
  std::vector<BatchEntry> open_entries_;
  std::map<uint64_t, std::shared_ptr<const InfectedBatch>> sealed_;
  uint64_t next_session_id_ = 1;
  std::map<uint64_t, PsiSessionState> sessions_;
  std::map<std::string, UtcTime> nonces_;
};

}  // namespace ctrace::server

#endif  // CTRACE_SERVER_TRACING_SERVER_H_
