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
#include "ctrace/psi/psi_session.h"

#include <algorithm>

#include "ctrace/common/status_macros.h"

namespace ctrace::psi {

size_t PsiResult::Hits(size_t group, size_t filter) const {
  size_t total = 0;
  for (const auto& batch : per_batch) {
    if (group < batch.size() && filter < batch[group].hits.size()) {
      total += batch[group].hits[filter];
    }
  }
  return total;
}

size_t PsiResult::TotalHits() const {
  size_t total = 0;
  for (const auto& batch : per_batch) {
    for (const auto& g : batch) {
      for (size_t h : g.hits) total += h;
    }
  }
  return total;
}

absl::StatusOr<PsiClientSession> PsiClientSession::Create(
    std::vector<std::vector<tcn::ContactEventTcn>> groups, size_t min_query,
    RandomSource& rng) {
  if (groups.empty()) return absl::InvalidArgumentError("no query groups");
  ASSIGN_OR_RETURN(CommutativeKey key, CommutativeKey::Generate(rng));
  return PsiClientSession(std::move(key), std::move(groups), min_query);
}

absl::StatusOr<PsiClientSession> PsiClientSession::Create(
    std::vector<tcn::ContactEventTcn> observed, size_t min_query,
    RandomSource& rng) {
  std::vector<std::vector<tcn::ContactEventTcn>> groups;
  groups.push_back(std::move(observed));
  return Create(std::move(groups), min_query, rng);
}

size_t PsiClientSession::padded_size(size_t group) const {
  return std::max(groups_.at(group).size(), min_query_);
}

absl::StatusOr<ElementGroups> PsiClientSession::Round1(RandomSource& rng) {
  if (state_ != SessionState::kInit) {
    return absl::FailedPreconditionError(
        "PSI client session already used; create a new session per query");
  }
  ElementGroups out;
  out.reserve(groups_.size());
  padding_.clear();
  for (const auto& group : groups_) {
    std::vector<GroupElement> hashed;
    hashed.reserve(std::max(group.size(), min_query_));
    for (const auto& ce : group) hashed.push_back(HashToGroup(ce));
    size_t pad = group.size() < min_query_ ? min_query_ - group.size() : 0;
    for (size_t i = 0; i < pad; ++i) {
      tcn::ContactEventTcn filler;
      RETURN_IF_ERROR(rng.Fill(filler.bytes));
      hashed.push_back(HashToGroup(filler));
    }
    padding_.push_back(pad);
    std::shuffle(hashed.begin(), hashed.end(), rng);
    for (auto& e : hashed) e = key_.Encrypt(e);
    out.push_back(std::move(hashed));
  }
  state_ = SessionState::kRound1Sent;
  return out;
}

absl::StatusOr<PsiResult> PsiClientSession::Finish(
    std::span<const BatchReply> replies) {
  if (state_ != SessionState::kRound1Sent) {
    return absl::FailedPreconditionError("PSI session is not awaiting a reply");
  }
  PsiResult result;
  std::vector<std::vector<std::vector<GroupElement>>> stripped;
  for (const BatchReply& reply : replies) {
    if (reply.groups.size() != groups_.size()) {
      state_ = SessionState::kDone;
      return absl::DataLossError("protocol abort: reply has " +
                                 std::to_string(reply.groups.size()) +
                                 " groups, expected " +
                                 std::to_string(groups_.size()));
    }
    std::vector<GroupResult> batch_result;
    std::vector<std::vector<GroupElement>> batch_stripped;
    for (size_t g = 0; g < groups_.size(); ++g) {
      if (reply.groups[g].size() != padded_size(g)) {
        state_ = SessionState::kDone;
        return absl::DataLossError("protocol abort: reply length mismatch");
      }
      GroupResult gr;
      gr.padding = padding_[g];
      gr.hits.assign(reply.filters.size(), 0);
      std::vector<GroupElement> plain;
      plain.reserve(reply.groups[g].size());
      for (const GroupElement& e : reply.groups[g]) {
        plain.push_back(key_.Strip(e));
      }
      for (size_t f = 0; f < reply.filters.size(); ++f) {
        for (const GroupElement& e : plain) {
          if (reply.filters[f]->MayContain(e)) ++gr.hits[f];
        }
        gr.expected_padding_false_positives +=
            gr.padding * reply.filters[f]->FalsePositiveRate();
      }
      batch_result.push_back(std::move(gr));
      batch_stripped.push_back(std::move(plain));
    }
    result.batch_ids.push_back(reply.batch_id);
    result.per_batch.push_back(std::move(batch_result));
    stripped.push_back(std::move(batch_stripped));
  }
  stripped_ = std::move(stripped);
  state_ = SessionState::kDone;
  return result;
}

absl::StatusOr<size_t> PsiClientSession::CountIn(
    size_t batch_index, size_t group, const MembershipFilter& filter) const {
  if (state_ != SessionState::kDone || batch_index >= stripped_.size() ||
      group >= stripped_[batch_index].size()) {
    return absl::FailedPreconditionError("no stripped reply for that slot");
  }
  size_t n = 0;
  for (const auto& e : stripped_[batch_index][group]) {
    if (filter.MayContain(e)) ++n;
  }
  return n;
}

absl::StatusOr<ElementGroups> ServerRespond(const CommutativeKey& batch_key,
                                            const ElementGroups& groups,
                                            size_t min_query,
                                            RandomSource& rng) {
  const PrimeGroup& group = PrimeGroup::Default();
  ElementGroups out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.size() < min_query) {
      return absl::InvalidArgumentError(
          "query of " + std::to_string(g.size()) +
          " elements is below the minimum of " + std::to_string(min_query));
    }
    std::vector<GroupElement> enc;
    enc.reserve(g.size());
    for (const GroupElement& e : g) {
      if (!group.LooksValid(e)) {
        return absl::InvalidArgumentError("query element outside the group");
      }
      enc.push_back(batch_key.Encrypt(e));
    }
    std::shuffle(enc.begin(), enc.end(), rng);
    out.push_back(std::move(enc));
  }
  return out;
}

absl::StatusOr<std::vector<ElementGroups>> PsiServerSession::RespondAll(
    const ElementGroups& groups, RandomSource& rng) {
  std::vector<ElementGroups> out;
  out.reserve(batch_keys_.size());
  for (const auto& key : batch_keys_) {
    ASSIGN_OR_RETURN(ElementGroups reply,
                     ServerRespond(*key, groups, min_query_, rng));
    out.push_back(std::move(reply));
  }
  return out;
}

absl::StatusOr<std::vector<ElementGroups>> PsiServerSession::RespondRound1(
    const ElementGroups& groups, RandomSource& rng) {
  if (state_ != SessionState::kInit) {
    return absl::FailedPreconditionError("first round already answered");
  }
  if (groups.size() != 1) {
    return absl::InvalidArgumentError("first round takes exactly one group");
  }
  ASSIGN_OR_RETURN(auto out, RespondAll(groups, rng));
  state_ = SessionState::kRound1Sent;
  return out;
}

absl::StatusOr<std::vector<ElementGroups>> PsiServerSession::RespondFollowUp(
    const ElementGroups& groups, RandomSource& rng) {
  if (state_ != SessionState::kRound1Sent) {
    return absl::FailedPreconditionError(
        "follow-up query requires an answered first round and is single-use");
  }
  if (groups.empty() || groups.size() > max_followup_groups_) {
    return absl::InvalidArgumentError("follow-up takes 1.." +
                                      std::to_string(max_followup_groups_) +
                                      " groups");
  }
  ASSIGN_OR_RETURN(auto out, RespondAll(groups, rng));
  state_ = SessionState::kDone;
  return out;
}

std::vector<GroupElement> EncryptSet(
    const CommutativeKey& key, std::span<const tcn::ContactEventTcn> set) {
  std::vector<GroupElement> out;
  out.reserve(set.size());
  for (const auto& ce : set) out.push_back(key.Encrypt(HashToGroup(ce)));
  return out;
}

BloomFilter BuildBloomFilter(std::span<const GroupElement> encrypted, int k) {
  BloomFilter f = BloomFilter::ForCapacity(encrypted.size(), k);
  for (const auto& e : encrypted) f.Insert(e);
  return f;
}

}  // namespace ctrace::psi
