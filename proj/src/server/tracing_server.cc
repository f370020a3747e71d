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
#include "ctrace/server/tracing_server.h"

#include <algorithm>
#include <set>

#include "absl/strings/cord.h"
#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"

namespace ctrace::server {
namespace {

using nlohmann::json;
using tcn::ContactEventTcn;

constexpr char kRetryAfterUrl[] = "ctrace/retry_after_ms";

json EntriesToJson(std::span<const BatchEntry> entries) {
  json out = json::array();
  for (const auto& e : entries) {
    out.push_back({e.ce_tcn.Hex(), e.order == OrderTag::kFirstOrder ? "F" : "S"});
  }
  return out;
}

absl::StatusOr<std::vector<BatchEntry>> EntriesFromJson(const json& j) {
  std::vector<BatchEntry> out;
  if (!j.is_array()) return absl::DataLossError("entries must be an array");
  for (const auto& item : j) {
    if (!item.is_array() || item.size() != 2 || !item[0].is_string() ||
        !item[1].is_string()) {
      return absl::DataLossError("malformed batch entry");
    }
    ASSIGN_OR_RETURN(auto ce, ContactEventTcn::FromHex(item[0].get<std::string>()));
    std::string tag = item[1].get<std::string>();
    if (tag != "F" && tag != "S") return absl::DataLossError("bad order tag");
    out.push_back({ce, tag == "F" ? OrderTag::kFirstOrder : OrderTag::kSecondOrder});
  }
  return out;
}

json TanToJson(const UploadAuthorization& a) {
  return {{"type", "tan"},
          {"tan", a.tan},
          {"kind", AuthorizationKindName(a.kind)},
          {"issued_at", FormatIsoTimestamp(a.issued_at)},
          {"validity_ms", a.validity.count()},
          {"consumed", a.consumed}};
}

psi::BloomFilter FilterOver(std::span<const psi::GroupElement> encrypted,
                            int k) {
  auto filter = psi::BloomFilter::ForCapacity(encrypted.size(), k);
  for (const auto& e : encrypted) filter.Insert(e);
  return filter;
}

}  // namespace

std::string_view OrderTagName(OrderTag tag) {
  return tag == OrderTag::kFirstOrder ? "FIRST_ORDER" : "SECOND_ORDER";
}

absl::StatusOr<OrderTag> ParseOrderTag(std::string_view name) {
  if (name == "FIRST_ORDER") return OrderTag::kFirstOrder;
  if (name == "SECOND_ORDER") return OrderTag::kSecondOrder;
  return absl::InvalidArgumentError("unknown order tag: " + std::string(name));
}

size_t InfectedBatch::CountOf(OrderTag tag) const {
  return std::count_if(entries.begin(), entries.end(),
                       [tag](const BatchEntry& e) { return e.order == tag; });
}

ProofResponse ComputeProofResponse(const ContactEventTcn& ce_tcn,
                                   std::span<const uint8_t> nonce) {
  return HmacSha256(ce_tcn.span(), nonce);
}

std::optional<std::chrono::milliseconds> RetryAfterOf(const absl::Status& s) {
  auto payload = s.GetPayload(kRetryAfterUrl);
  if (!payload.has_value()) return std::nullopt;
  int64_t ms = 0;
  if (!ParseNumber(std::string(*payload), &ms)) return std::nullopt;
  return std::chrono::milliseconds(ms);
}

absl::Status WithRetryAfter(absl::Status status,
                            std::chrono::milliseconds retry_after) {
  status.SetPayload(kRetryAfterUrl,
                    absl::Cord(std::to_string(retry_after.count())));
  return status;
}

absl::Status RateLimited(std::chrono::milliseconds retry_after) {
  return WithRetryAfter(absl::ResourceExhaustedError("query rate limit reached"),
                        retry_after);
}

TracingServer::TracingServer(ServerConfig config, UtcTime now,
                             std::unique_ptr<RandomSource> rng,
                             std::unique_ptr<ServerLog> log)
    : config_(std::move(config)),
      rng_(std::make_unique<LockedRandom>(std::move(rng))),
      log_(std::move(log)),
      tans_(config_.tan_validity),
      limiter_(config_.psi_sessions_per_window, config_.rate_window),
      open_since_(now) {}

TracingServer::~TracingServer() = default;

absl::StatusOr<std::unique_ptr<TracingServer>> TracingServer::Create(
    ServerConfig config, UtcTime now, std::unique_ptr<RandomSource> rng) {
  if (config.window_days != 14 && config.window_days != 21) {
    return absl::InvalidArgumentError("window_days must be 14 or 21");
  }
  if (config.min_query == 0) {
    return absl::InvalidArgumentError("min_query must be positive");
  }
  if (config.batch_period <= std::chrono::milliseconds(0)) {
    return absl::InvalidArgumentError("batch_period must be positive");
  }
  if (rng == nullptr) rng = std::make_unique<SecureRandom>();
  std::vector<json> records;
  if (!config.log_path.empty()) {
    ASSIGN_OR_RETURN(records, ServerLog::ReadAll(config.log_path));
  }
  ASSIGN_OR_RETURN(auto log, ServerLog::Open(config.log_path));
  std::unique_ptr<TracingServer> server(
      new TracingServer(std::move(config), now, std::move(rng), std::move(log)));
  if (!records.empty()) {
    RETURN_IF_ERROR(server->Replay(records));
  } else {
    server->LogOrWarn({{"type", "open"},
                       {"batch_id", server->open_batch_id_},
                       {"opened_at", FormatIsoTimestamp(now)}});
  }
  return server;
}

absl::Status TracingServer::Replay(const std::vector<json>& records) {
  std::map<uint64_t, std::vector<BatchEntry>> pending;
  try {
    for (const json& r : records) {
      std::string type = r.at("type").get<std::string>();
      if (type == "tan") {
        ASSIGN_OR_RETURN(auto ts, ParseIsoTimestamp(r.at("issued_at").get<std::string>()));
        ASSIGN_OR_RETURN(auto kind, ParseAuthorizationKind(r.at("kind").get<std::string>()));
        tans_.Restore({r.at("tan").get<std::string>(), ts,
                       std::chrono::milliseconds(r.at("validity_ms").get<int64_t>()),
                       r.value("consumed", false), kind});
      } else if (type == "tan_consumed") {
        tans_.MarkConsumed(r.at("tan").get<std::string>());
      } else if (type == "enqueue") {
        ASSIGN_OR_RETURN(auto entries, EntriesFromJson(r.at("entries")));
        auto& dst = pending[r.at("batch_id").get<uint64_t>()];
        dst.insert(dst.end(), entries.begin(), entries.end());
      } else if (type == "seal") {
        uint64_t id = r.at("batch_id").get<uint64_t>();
        ASSIGN_OR_RETURN(auto ts, ParseIsoTimestamp(r.at("sealed_at").get<std::string>()));
        ASSIGN_OR_RETURN(auto key, psi::CommutativeKey::FromHex(r.at("key").get<std::string>()));
        auto entries = std::move(pending[id]);
        pending.erase(id);
        sealed_[id] = BuildBatch(
            id, ts, std::move(entries),
            std::make_shared<const psi::CommutativeKey>(std::move(key)));
      } else if (type == "open") {
        open_batch_id_ = r.at("batch_id").get<uint64_t>();
        ASSIGN_OR_RETURN(open_since_, ParseIsoTimestamp(r.at("opened_at").get<std::string>()));
      } else {
        return absl::DataLossError("unknown server log record type " + type);
      }
    }
  } catch (const json::exception& e) {
    return absl::DataLossError(std::string("malformed server log record: ") +
                               e.what());
  }
  // Entries queued but never sealed belong to the open batch.
  for (auto& [id, entries] : pending) {
    if (sealed_.contains(id)) {
      return absl::DataLossError("entries logged for sealed batch " +
                                 std::to_string(id));
    }
    open_batch_id_ = std::max(open_batch_id_, id);
    open_entries_.insert(open_entries_.end(), entries.begin(), entries.end());
  }
  if (!sealed_.empty()) {
    open_batch_id_ = std::max(open_batch_id_, sealed_.rbegin()->first + 1);
  }
  return absl::OkStatus();
}

void TracingServer::LogOrWarn(const json& record) {
  // Persistence failures must not take the service down; the next
  // compaction rewrites the full state.
  (void)log_->Append(record);
}

absl::StatusOr<UploadAuthorization> TracingServer::IssueTan(
    AuthorizationKind kind, std::string_view credential, UtcTime now) {
  if (kind != AuthorizationKind::kMedical) {
    return absl::PermissionDeniedError(
        "second-order TANs are only issued against a proof of contact");
  }
  const auto& creds = config_.medical_credentials;
  if (credential.empty() ||
      std::find(creds.begin(), creds.end(), credential) == creds.end()) {
    return absl::UnauthenticatedError("medical credential not recognised");
  }
  std::shared_lock lock(mu_);
  ASSIGN_OR_RETURN(auto auth, tans_.Issue(kind, now, *rng_));
  LogOrWarn(TanToJson(auth));
  return auth;
}

absl::StatusOr<size_t> TracingServer::AcceptReport(const ReportRequest& report,
                                                   UtcTime now) {
  ASSIGN_OR_RETURN(UploadAuthorization auth, tans_.Check(report.tan, now));
  if (report.keys.empty()) {
    return absl::InvalidArgumentError(
        "report carries no daily keys; contact numbers are only accepted "
        "together with the keys that generate them");
  }
  if (report.keys.size() > static_cast<size_t>(config_.window_days)) {
    return absl::InvalidArgumentError(
        "report covers " + std::to_string(report.keys.size()) +
        " days, more than the " + std::to_string(config_.window_days) +
        "-day window");
  }
  Date today = DateOf(now);
  Date oldest = today - std::chrono::days(config_.window_days);
  std::set<Date> dates;
  for (const auto& key : report.keys) {
    if (key.date() > today || key.date() < oldest) {
      return absl::InvalidArgumentError("key dated " +
                                        FormatIsoDate(key.date()) +
                                        " is outside the reporting window");
    }
    if (!dates.insert(key.date()).second) {
      return absl::InvalidArgumentError("two keys for " +
                                        FormatIsoDate(key.date()));
    }
  }

  OrderTag order = auth.kind == AuthorizationKind::kSecondOrder
                       ? OrderTag::kSecondOrder
                       : OrderTag::kFirstOrder;
  std::vector<BatchEntry> entries;
  entries.reserve(report.keys.size() * tcn::kIntervalsPerDay);
  for (const auto& key : report.keys) {
    for (const auto& interval : tcn::RegenerateDayTcns(key)) {
      entries.push_back({interval.ce_tcn, order});
    }
  }
  if (!report.ce_tcns.empty()) {
    std::vector<ContactEventTcn> claimed = report.ce_tcns;
    std::vector<ContactEventTcn> regenerated;
    for (const auto& e : entries) regenerated.push_back(e.ce_tcn);
    std::sort(claimed.begin(), claimed.end());
    std::sort(regenerated.begin(), regenerated.end());
    if (claimed != regenerated) {
      return absl::InvalidArgumentError(
          "uploaded contact numbers do not match the uploaded keys");
    }
  }

  std::unique_lock lock(mu_);
  RETURN_IF_ERROR(tans_.Consume(report.tan, now));
  LogOrWarn({{"type", "tan_consumed"}, {"tan", report.tan}});
  open_entries_.insert(open_entries_.end(), entries.begin(), entries.end());
  LogOrWarn({{"type", "enqueue"},
             {"batch_id", open_batch_id_},
             {"entries", EntriesToJson(entries)}});
  return entries.size();
}

absl::Status TracingServer::AddEntries(uint64_t batch_id,
                                       std::span<const BatchEntry> entries) {
  std::unique_lock lock(mu_);
  if (batch_id != open_batch_id_) {
    if (batch_id < open_batch_id_) {
      return absl::FailedPreconditionError(
          "batch " + std::to_string(batch_id) + " is sealed");
    }
    return absl::NotFoundError("no batch " + std::to_string(batch_id));
  }
  open_entries_.insert(open_entries_.end(), entries.begin(), entries.end());
  LogOrWarn({{"type", "enqueue"},
             {"batch_id", open_batch_id_},
             {"entries", EntriesToJson(entries)}});
  return absl::OkStatus();
}

uint64_t TracingServer::open_batch_id() const {
  std::shared_lock lock(mu_);
  return open_batch_id_;
}

size_t TracingServer::open_entry_count() const {
  std::shared_lock lock(mu_);
  return open_entries_.size();
}

std::shared_ptr<const InfectedBatch> TracingServer::BuildBatch(
    uint64_t batch_id, UtcTime sealed_at, std::vector<BatchEntry> entries,
    std::shared_ptr<const psi::CommutativeKey> key) const {
  auto batch = std::make_shared<InfectedBatch>();
  batch->batch_id = batch_id;
  batch->sealed_at = sealed_at;
  // Shuffle across reports, then sort: the released order depends only on
  // the hash values.
  std::shuffle(entries.begin(), entries.end(), *rng_);
  std::sort(entries.begin(), entries.end());
  entries.erase(std::unique(entries.begin(), entries.end()), entries.end());
  batch->entries = std::move(entries);
  batch->key = std::move(key);

  std::vector<ContactEventTcn> first, second;
  for (const auto& e : batch->entries) {
    (e.order == OrderTag::kFirstOrder ? first : second).push_back(e.ce_tcn);
  }
  auto enc_first = psi::EncryptSet(*batch->key, first);
  auto enc_second = psi::EncryptSet(*batch->key, second);
  batch->first_order_filter = FilterOver(enc_first, config_.bloom_hash_count);
  batch->second_order_filter = FilterOver(enc_second, config_.bloom_hash_count);
  if (config_.exact_filters) {
    batch->exact_first_order.emplace(std::move(enc_first));
    batch->exact_second_order.emplace(std::move(enc_second));
  }
  return batch;
}

std::shared_ptr<const InfectedBatch> TracingServer::SealLocked(
    UtcTime sealed_at) {
  auto key = psi::CommutativeKey::Generate(*rng_);
  if (!key.ok()) return nullptr;
  uint64_t id = open_batch_id_;
  std::vector<BatchEntry> entries;
  entries.swap(open_entries_);
  auto batch = BuildBatch(
      id, sealed_at, std::move(entries),
      std::make_shared<const psi::CommutativeKey>(std::move(*key)));
  sealed_[id] = batch;
  open_batch_id_ = id + 1;
  open_since_ = sealed_at;
  LogOrWarn({{"type", "seal"},
             {"batch_id", id},
             {"sealed_at", FormatIsoTimestamp(sealed_at)},
             {"key", batch->key->ExponentHex()}});
  LogOrWarn({{"type", "open"},
             {"batch_id", open_batch_id_},
             {"opened_at", FormatIsoTimestamp(open_since_)}});
  return batch;
}

std::vector<std::shared_ptr<const InfectedBatch>> TracingServer::Tick(
    UtcTime now) {
  std::vector<std::shared_ptr<const InfectedBatch>> out;
  std::unique_lock lock(mu_);
  while (open_since_ + config_.batch_period <= now) {
    auto batch = SealLocked(open_since_ + config_.batch_period);
    if (batch == nullptr) break;
    out.push_back(std::move(batch));
  }
  return out;
}

std::shared_ptr<const InfectedBatch> TracingServer::SealNow(UtcTime now) {
  std::unique_lock lock(mu_);
  return SealLocked(std::max(now, open_since_));
}

std::vector<BatchSummary> TracingServer::ReleaseBatches(
    uint64_t since, ReleaseMode mode) const {
  std::shared_lock lock(mu_);
  std::vector<BatchSummary> out;
  for (auto it = sealed_.upper_bound(since); it != sealed_.end(); ++it) {
    const InfectedBatch& b = *it->second;
    BatchSummary s;
    s.batch_id = b.batch_id;
    s.sealed_at = b.sealed_at;
    s.entry_count = b.entries.size();
    if (mode == ReleaseMode::kDirect) {
      for (const auto& e : b.entries) {
        (e.order == OrderTag::kFirstOrder ? s.first_order : s.second_order)
            .push_back(e.ce_tcn);
      }
    } else {
      s.first_order_filter = b.first_order_filter.Encode();
      s.second_order_filter = b.second_order_filter.Encode();
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::shared_ptr<const InfectedBatch> TracingServer::Batch(
    uint64_t batch_id) const {
  std::shared_lock lock(mu_);
  auto it = sealed_.find(batch_id);
  return it == sealed_.end() ? nullptr : it->second;
}

std::vector<uint64_t> TracingServer::BatchIds() const {
  std::shared_lock lock(mu_);
  std::vector<uint64_t> ids;
  for (const auto& [id, b] : sealed_) ids.push_back(id);
  return ids;
}

RateDecision TracingServer::RateLimitCheck(const std::string& client_token,
                                           UtcTime now) const {
  return limiter_.Check(client_token, now);
}

absl::StatusOr<PsiReply> TracingServer::PsiRound1(
    const std::string& client_token, std::span<const uint64_t> batch_ids,
    const psi::ElementGroups& groups, UtcTime now) {
  if (client_token.empty()) {
    return absl::InvalidArgumentError("client_token is required");
  }
  if (groups.size() != 1) {
    return absl::InvalidArgumentError("round one takes exactly one group");
  }
  if (groups[0].size() < config_.min_query) {
    return absl::InvalidArgumentError(
        "query of " + std::to_string(groups[0].size()) +
        " elements is below the minimum of " +
        std::to_string(config_.min_query));
  }
  if (batch_ids.empty() || batch_ids.size() > config_.max_batches_per_query) {
    return absl::InvalidArgumentError("a query names 1.." +
                                      std::to_string(config_.max_batches_per_query) +
                                      " batches");
  }
  std::vector<std::shared_ptr<const psi::CommutativeKey>> keys;
  {
    std::shared_lock lock(mu_);
    for (uint64_t id : batch_ids) {
      auto it = sealed_.find(id);
      if (it == sealed_.end()) {
        return absl::NotFoundError("no sealed batch " + std::to_string(id));
      }
      keys.push_back(it->second->key);
    }
  }
  RateDecision decision = limiter_.Acquire(client_token, now);
  if (!decision.allowed) return RateLimited(decision.retry_after);

  auto session = std::make_unique<psi::PsiServerSession>(
      keys, config_.min_query, config_.max_followup_groups);
  ASSIGN_OR_RETURN(auto replies, session->RespondRound1(groups, *rng_));

  PsiReply reply;
  reply.batch_ids.assign(batch_ids.begin(), batch_ids.end());
  reply.per_batch = std::move(replies);
  std::unique_lock lock(mu_);
  std::erase_if(sessions_, [&](const auto& kv) {
    return kv.second.created_at + config_.psi_session_ttl <= now;
  });
  reply.session_id = next_session_id_++;
  sessions_[reply.session_id] = {std::move(session), reply.batch_ids, now};
  return reply;
}

absl::StatusOr<PsiReply> TracingServer::PsiRefine(
    uint64_t session_id, const psi::ElementGroups& groups, UtcTime now) {
  PsiSessionState state;
  {
    std::unique_lock lock(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() ||
        it->second.created_at + config_.psi_session_ttl <= now) {
      if (it != sessions_.end()) sessions_.erase(it);
      return absl::NotFoundError("no open PSI session " +
                                 std::to_string(session_id));
    }
    state = std::move(it->second);
    sessions_.erase(it);
  }
  ASSIGN_OR_RETURN(auto replies, state.session->RespondFollowUp(groups, *rng_));
  PsiReply reply;
  reply.session_id = session_id;
  reply.batch_ids = state.batch_ids;
  reply.per_batch = std::move(replies);
  return reply;
}

ProofChallenge TracingServer::IssueProofChallenge(UtcTime now) {
  std::array<uint8_t, 32> nonce{};
  if (!rng_->Fill(nonce).ok()) return {};
  ProofChallenge c{HexEncode(nonce), now + config_.challenge_validity};
  std::unique_lock lock(mu_);
  std::erase_if(nonces_, [now](const auto& kv) { return kv.second <= now; });
  nonces_[c.nonce_hex] = c.expires_at;
  return c;
}

absl::StatusOr<UploadAuthorization> TracingServer::VerifyContactProof(
    std::string_view nonce_hex, std::span<const ProofResponse> responses,
    UtcTime now) {
  std::vector<ContactEventTcn> infected;
  {
    std::unique_lock lock(mu_);
    auto it = nonces_.find(std::string(nonce_hex));
    if (it == nonces_.end() || it->second <= now) {
      if (it != nonces_.end()) nonces_.erase(it);
      return absl::PermissionDeniedError("unknown, expired or used nonce");
    }
    nonces_.erase(it);
    if (responses.empty() || responses.size() > config_.max_proof_responses) {
      return absl::InvalidArgumentError("proof must carry 1.." +
                                        std::to_string(config_.max_proof_responses) +
                                        " responses");
    }
    Date oldest = DateOf(now) - std::chrono::days(config_.window_days);
    for (const auto& [id, batch] : sealed_) {
      if (DateOf(batch->sealed_at) < oldest) continue;
      for (const auto& e : batch->entries) {
        if (e.order == OrderTag::kFirstOrder) infected.push_back(e.ce_tcn);
      }
    }
  }
  ASSIGN_OR_RETURN(Bytes nonce, HexDecode(nonce_hex));
  std::vector<ProofResponse> expected;
  expected.reserve(infected.size());
  for (const auto& ce : infected) {
    expected.push_back(ComputeProofResponse(ce, nonce));
  }
  std::sort(expected.begin(), expected.end());
  bool matched = std::any_of(
      responses.begin(), responses.end(), [&](const ProofResponse& r) {
        return std::binary_search(expected.begin(), expected.end(), r);
      });
  if (!matched) {
    return absl::PermissionDeniedError("proof of contact not accepted");
  }
  std::shared_lock lock(mu_);
  ASSIGN_OR_RETURN(auto auth,
                   tans_.Issue(AuthorizationKind::kSecondOrder, now, *rng_));
  LogOrWarn(TanToJson(auth));
  return auth;
}

size_t TracingServer::PurgeBatches(UtcTime now) {
  std::unique_lock lock(mu_);
  Date oldest = DateOf(now) - std::chrono::days(config_.window_days);
  size_t removed = std::erase_if(sealed_, [oldest](const auto& kv) {
    return DateOf(kv.second->sealed_at) < oldest;
  });
  tans_.PurgeExpired(now);
  (void)Compact();
  return removed;
}

absl::Status TracingServer::Compact() {
  if (!log_->persistent()) return absl::OkStatus();
  std::vector<json> records;
  for (const auto& auth : tans_.All()) records.push_back(TanToJson(auth));
  for (const auto& [id, batch] : sealed_) {
    records.push_back({{"type", "enqueue"},
                       {"batch_id", id},
                       {"entries", EntriesToJson(batch->entries)}});
    records.push_back({{"type", "seal"},
                       {"batch_id", id},
                       {"sealed_at", FormatIsoTimestamp(batch->sealed_at)},
                       {"key", batch->key->ExponentHex()}});
  }
  records.push_back({{"type", "open"},
                     {"batch_id", open_batch_id_},
                     {"opened_at", FormatIsoTimestamp(open_since_)}});
  if (!open_entries_.empty()) {
    records.push_back({{"type", "enqueue"},
                       {"batch_id", open_batch_id_},
                       {"entries", EntriesToJson(open_entries_)}});
  }
  return log_->Rewrite(records);
}

}  // namespace ctrace::server
