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
#ifndef CTRACE_PSI_SECOND_QUERY_H_
#define CTRACE_PSI_SECOND_QUERY_H_

#include <chrono>
#include <span>
#include <vector>

#include "ctrace/common/random.h"
#include "ctrace/store/exposure.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::psi {

struct ObservedContact {
  tcn::ContactEventTcn ce_tcn;
  store::ExposureCategory category;
};

// Follow-up query that splits the observed set by exposure category, one
// group per category in kAllCategories order. A client whose first round
// found nothing still sends one, filled with observed ceTCNs drawn at random
// in the same group sizes, so the server sees the same traffic either way.
struct SecondQueryPlan {
  bool decoy = false;
  std::vector<std::vector<tcn::ContactEventTcn>> groups;
  std::chrono::milliseconds delay{0};
};

inline constexpr std::chrono::milliseconds kDefaultMaxSecondQueryDelay =
    std::chrono::minutes(5);

SecondQueryPlan PlanSecondQuery(
    size_t first_round_hits, std::span<const ObservedContact> observed,
    RandomSource& rng,
    std::chrono::milliseconds max_delay = kDefaultMaxSecondQueryDelay);

}  // namespace ctrace::psi

#endif  // CTRACE_PSI_SECOND_QUERY_H_
