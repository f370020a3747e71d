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
#include "ctrace/harness/client_app.h"

#include <algorithm>
#include <set>

#include "ctrace/common/status_macros.h"
#include "ctrace/psi/second_query.h"

namespace ctrace::harness {
namespace {

constexpr size_t kMaxBatchesPerSession = 512;

void AddCategory(CategoryCounts& counts, store::ExposureCategory c, size_t n) {
  if (n > 0) counts[c] += n;
}

}  // namespace

ClientApp::ClientApp(std::string id, uint64_t seed,
                     store::ExposureThresholds thresholds)
    : id_(std::move(id)), rng_(seed), store_(thresholds) {}

absl::StatusOr<MatchReport> ClientApp::CheckDirect(TracingApi& api) {
  ASSIGN_OR_RETURN(auto batches, api.Batches(last_batch_, ReleaseMode::kDirect));
  MatchReport report;
  auto exposures = store_.ClassifyExposures();
  for (const auto& b : batches) {
    last_batch_ = std::max(last_batch_, b.batch_id);
    ++report.batches;
    for (const auto& ce : b.first_order) {
      auto it = exposures.find(ce);
      if (it == exposures.end()) continue;
      ++report.first_order;
      AddCategory(report.first_by_category, it->second, 1);
    }
    for (const auto& ce : b.second_order) {
      auto it = exposures.find(ce);
      if (it == exposures.end()) continue;
      ++report.second_order;
      AddCategory(report.second_by_category, it->second, 1);
    }
  }
  return report;
}

absl::StatusOr<MatchReport> ClientApp::CheckPsi(TracingApi& api,
                                                const std::string& client_token,
                                                size_t min_query) {
  ASSIGN_OR_RETURN(auto batches, api.Batches(last_batch_, ReleaseMode::kPsi));
  MatchReport report;
  auto exposures = store_.ClassifyExposures();
  std::vector<psi::ObservedContact> observed;
  std::vector<tcn::ContactEventTcn> all;
  for (const auto& [ce, category] : exposures) {
    observed.push_back({ce, category});
    all.push_back(ce);
  }

  for (size_t begin = 0; begin < batches.size(); begin += kMaxBatchesPerSession) {
    size_t end = std::min(batches.size(), begin + kMaxBatchesPerSession);
    std::vector<uint64_t> ids;
    std::vector<psi::BloomFilter> filters;
    filters.reserve(2 * (end - begin));
    for (size_t i = begin; i < end; ++i) {
      ids.push_back(batches[i].batch_id);
      ASSIGN_OR_RETURN(auto first, psi::BloomFilter::Decode(batches[i].first_order_filter));
      ASSIGN_OR_RETURN(auto second, psi::BloomFilter::Decode(batches[i].second_order_filter));
      filters.push_back(std::move(first));
      filters.push_back(std::move(second));
    }
    auto replies_for = [&](const PsiReply& reply) -> absl::StatusOr<std::vector<psi::BatchReply>> {
      if (reply.per_batch.size() != ids.size()) {
        return absl::DataLossError("PSI reply covers the wrong number of batches");
      }
      std::vector<psi::BatchReply> out;
      for (size_t i = 0; i < ids.size(); ++i) {
        out.push_back({ids[i], reply.per_batch[i], {&filters[2 * i], &filters[2 * i + 1]}});
      }
      return out;
    };

    ASSIGN_OR_RETURN(auto session, psi::PsiClientSession::Create(all, min_query, rng_));
    ASSIGN_OR_RETURN(auto sent, session.Round1(rng_));
    ASSIGN_OR_RETURN(auto reply, api.PsiRound1(client_token, ids, sent.at(0)));
    ASSIGN_OR_RETURN(auto replies, replies_for(reply));
    ASSIGN_OR_RETURN(auto result, session.Finish(replies));
    size_t first = result.Hits(0, 0);
    size_t second = result.Hits(0, 1);
    report.first_order += first;
    report.second_order += second;
    for (const auto& per_group : result.per_batch) {
      report.expected_false_positives += per_group.at(0).expected_padding_false_positives;
    }

    psi::SecondQueryPlan plan = psi::PlanSecondQuery(first + second, observed, rng_);
    ASSIGN_OR_RETURN(auto follow, psi::PsiClientSession::Create(plan.groups, min_query, rng_));
    ASSIGN_OR_RETURN(auto follow_sent, follow.Round1(rng_));
    ASSIGN_OR_RETURN(auto follow_reply, api.PsiRefine(reply.session_id, follow_sent));
    ASSIGN_OR_RETURN(auto follow_replies, replies_for(follow_reply));
    ASSIGN_OR_RETURN(auto split, follow.Finish(follow_replies));
    if (!plan.decoy) {
      for (size_t g = 0; g < store::kAllCategories.size(); ++g) {
        AddCategory(report.first_by_category, store::kAllCategories[g], split.Hits(g, 0));
        AddCategory(report.second_by_category, store::kAllCategories[g], split.Hits(g, 1));
      }
    }
    report.batches += ids.size();
  }
  for (const auto& b : batches) last_batch_ = std::max(last_batch_, b.batch_id);
  return report;
}

absl::StatusOr<size_t> ClientApp::ReportInfection(TracingApi& api,
                                                  const std::string& tan,
                                                  UtcTime now) {
  ASSIGN_OR_RETURN(auto payload,
                   store_.PrepareReport(store::RetentionPolicy::Default(), now));
  ReportRequest request{tan, payload.keys, {}};
  ASSIGN_OR_RETURN(size_t accepted, api.Report(request));
  RETURN_IF_ERROR(store_.RotateAfterReport(payload, now, rng_).status());
  return accepted;
}

absl::StatusOr<UploadAuthorization> ClientApp::ProveContact(TracingApi& api,
                                                            size_t max_responses) {
  ASSIGN_OR_RETURN(auto challenge, api.ProofChallengeRequest());
  ASSIGN_OR_RETURN(Bytes nonce, HexDecode(challenge.nonce_hex));
  std::vector<ProofResponse> responses;
  for (const auto& record : store_.Records()) {
    responses.push_back(server::ComputeProofResponse(record.ce_tcn, nonce));
  }
  std::shuffle(responses.begin(), responses.end(), rng_);
  if (responses.size() > max_responses) responses.resize(max_responses);
  return api.ProofResponseRequest(challenge.nonce_hex, responses);
}

}  // namespace ctrace::harness
