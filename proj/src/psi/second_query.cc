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
#include "ctrace/psi/second_query.h"

#include <algorithm>

namespace ctrace::psi {

SecondQueryPlan PlanSecondQuery(size_t first_round_hits,
                                std::span<const ObservedContact> observed,
                                RandomSource& rng,
                                std::chrono::milliseconds max_delay) {
  SecondQueryPlan plan;
  plan.decoy = first_round_hits == 0;
  plan.groups.resize(store::kAllCategories.size());

  std::vector<size_t> sizes(store::kAllCategories.size(), 0);
  for (const auto& c : observed) ++sizes[static_cast<size_t>(c.category)];

  if (!plan.decoy) {
    for (const auto& c : observed) {
      plan.groups[static_cast<size_t>(c.category)].push_back(c.ce_tcn);
    }
  } else {
    std::vector<tcn::ContactEventTcn> pool;
    pool.reserve(observed.size());
    for (const auto& c : observed) pool.push_back(c.ce_tcn);
    std::shuffle(pool.begin(), pool.end(), rng);
    size_t next = 0;
    for (size_t g = 0; g < sizes.size(); ++g) {
      plan.groups[g].assign(pool.begin() + next, pool.begin() + next + sizes[g]);
      next += sizes[g];
    }
  }
  if (max_delay.count() > 0) {
    plan.delay = std::chrono::milliseconds(
        rng.Uniform(static_cast<uint64_t>(max_delay.count())));
  }
  return plan;
}

}  // namespace ctrace::psi
