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
// Private set intersection cardinality between a device (client) and the
// tracing server.
//
//   client: shuffle + pad its ceTCNs, send x^c for each      (Round1)
//   server: send back (x^c)^s, shuffled                      (Respond)
//   client: strip c to get x^s, test each against the
//           server's precomputed filter over {y^s : y infected}   (Finish)
//
// Because the server shuffles its reply the client learns only how many of
// its elements hit the filter, never which. A request is a list of groups;
// each group is padded to the server's minimum query size and answered
// independently, which is how per-category counts are obtained.

#ifndef CTRACE_PSI_PSI_SESSION_H_
#define CTRACE_PSI_PSI_SESSION_H_

#include <memory>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/psi/bloom_filter.h"
#include "ctrace/psi/commutative_key.h"
#include "ctrace/psi/group.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::psi {

inline constexpr size_t kDefaultMinQuery = 100;

enum class SessionState { kInit, kRound1Sent, kDone };

using ElementGroups = std::vector<std::vector<GroupElement>>;

// Server reply for one sealed batch, paired with that batch's filters.
struct BatchReply {
  uint64_t batch_id = 0;
  ElementGroups groups;
  std::vector<const MembershipFilter*> filters;
};

struct GroupResult {
  std::vector<size_t> hits;  // one count per filter
  size_t padding = 0;
  // padding * filter false-positive rate, summed over filters.
  double expected_padding_false_positives = 0.0;
};

struct PsiResult {
  std::vector<uint64_t> batch_ids;
  std::vector<std::vector<GroupResult>> per_batch;  // [batch][group]

  // Hits of one group against filter index f, summed over batches.
  size_t Hits(size_t group, size_t filter) const;
  size_t TotalHits() const;
};

class PsiClientSession {
 public:
  // Each session draws its own key and must not be reused.
  static absl::StatusOr<PsiClientSession> Create(
      std::vector<std::vector<tcn::ContactEventTcn>> groups, size_t min_query,
      RandomSource& rng);
  static absl::StatusOr<PsiClientSession> Create(
      std::vector<tcn::ContactEventTcn> observed, size_t min_query,
      RandomSource& rng);

  PsiClientSession(PsiClientSession&&) = default;
  PsiClientSession& operator=(PsiClientSession&&) = default;

  // Pads every group with hashes of fresh random strings up to min_query,
  // shuffles it and encrypts it under the session key.
  absl::StatusOr<ElementGroups> Round1(RandomSource& rng);

  absl::StatusOr<PsiResult> Finish(std::span<const BatchReply> replies);

  // After Finish: how many stripped elements of (batch, group) the given
  // filter admits.
  absl::StatusOr<size_t> CountIn(size_t batch_index, size_t group,
                                 const MembershipFilter& filter) const;

  SessionState state() const { return state_; }
  size_t group_count() const { return groups_.size(); }
  size_t padded_size(size_t group) const;

 private:
  PsiClientSession(CommutativeKey key,
                   std::vector<std::vector<tcn::ContactEventTcn>> groups,
                   size_t min_query)
      : key_(std::move(key)), groups_(std::move(groups)), min_query_(min_query) {}

  CommutativeKey key_;
  std::vector<std::vector<tcn::ContactEventTcn>> groups_;
  size_t min_query_;
  SessionState state_ = SessionState::kInit;
  std::vector<size_t> padding_;
  std::vector<std::vector<std::vector<GroupElement>>> stripped_;
};

// Re-encrypts every element under batch_key and shuffles within each group.
// Rejects groups smaller than min_query and elements outside the subgroup.
absl::StatusOr<ElementGroups> ServerRespond(const CommutativeKey& batch_key,
                                            const ElementGroups& groups,
                                            size_t min_query,
                                            RandomSource& rng);

// Server half of one client query: a first round with exactly one group and
// at most one follow-up with up to max_followup_groups groups, all against
// the same batch keys.
class PsiServerSession {
 public:
  PsiServerSession(std::vector<std::shared_ptr<const CommutativeKey>> batch_keys,
                   size_t min_query, size_t max_followup_groups = 4)
      : batch_keys_(std::move(batch_keys)),
        min_query_(min_query),
        max_followup_groups_(max_followup_groups) {}

  absl::StatusOr<std::vector<ElementGroups>> RespondRound1(
      const ElementGroups& groups, RandomSource& rng);
  absl::StatusOr<std::vector<ElementGroups>> RespondFollowUp(
      const ElementGroups& groups, RandomSource& rng);

  SessionState state() const { return state_; }

 private:
  absl::StatusOr<std::vector<ElementGroups>> RespondAll(
      const ElementGroups& groups, RandomSource& rng);

  std::vector<std::shared_ptr<const CommutativeKey>> batch_keys_;
  size_t min_query_;
  size_t max_followup_groups_;
  SessionState state_ = SessionState::kInit;
};

// Enc_key(HashToGroup(x)) for every x.
std::vector<GroupElement> EncryptSet(const CommutativeKey& key,
                                     std::span<const tcn::ContactEventTcn> set);

BloomFilter BuildBloomFilter(std::span<const GroupElement> encrypted,
                             int k = BloomFilter::kDefaultHashCount);

}  // namespace ctrace::psi

#endif  // CTRACE_PSI_PSI_SESSION_H_
