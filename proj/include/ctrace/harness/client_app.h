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
#ifndef CTRACE_HARNESS_CLIENT_APP_H_
#define CTRACE_HARNESS_CLIENT_APP_H_

#include <map>
#include <string>

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/harness/tracing_api.h"
#include "ctrace/store/encounter_store.h"

namespace ctrace::harness {

using CategoryCounts = std::map<store::ExposureCategory, size_t>;

// What one check against the server found.
struct MatchReport {
  size_t first_order = 0;
  size_t second_order = 0;
  CategoryCounts first_by_category;
  CategoryCounts second_by_category;
  // PSI only: padding elements expected to hit a Bloom filter by chance.
  double expected_false_positives = 0;
  size_t batches = 0;

  bool notified() const { return first_order + second_order > 0; }
};

// A device: its encounter store plus the client side of the protocol.
class ClientApp {
 public:
  ClientApp(std::string id, uint64_t seed,
            store::ExposureThresholds thresholds = {});

  const std::string& id() const { return id_; }
  store::EncounterStore& store() { return store_; }
  RandomSource& rng() { return rng_; }

  absl::StatusOr<tcn::TemporaryContactNumber> OwnTcnAt(UtcTime t) {
    return store_.OwnTcnAt(t, rng_);
  }

  // Downloads the plaintext lists of batches released since the last check
  // and intersects them locally.
  absl::StatusOr<MatchReport> CheckDirect(TracingApi& api);

  // Same question answered by PSI cardinality: one round over all observed
  // ceTCNs, then a per-category follow-up (a decoy when nothing matched).
  absl::StatusOr<MatchReport> CheckPsi(TracingApi& api,
                                       const std::string& client_token,
                                       size_t min_query);

  // Uploads the retained daily keys under tan, then rotates today's key.
  absl::StatusOr<size_t> ReportInfection(TracingApi& api, const std::string& tan,
                                         UtcTime now);

  // Answers a proof-of-contact challenge with every observed ceTCN.
  absl::StatusOr<UploadAuthorization> ProveContact(TracingApi& api,
                                                   size_t max_responses);

 private:
  std::string id_;
  SeededRandom rng_;
  store::EncounterStore store_;
  uint64_t last_batch_ = 0;
};

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_CLIENT_APP_H_
