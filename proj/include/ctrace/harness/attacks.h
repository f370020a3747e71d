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
#ifndef CTRACE_HARNESS_ATTACKS_H_
#define CTRACE_HARNESS_ATTACKS_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/harness/e2e.h"
#include "ctrace/harness/outcome.h"
#include "ctrace/sim/scenario.h"

namespace ctrace::harness {

struct AttackOptions {
  HarnessOptions harness;
  int trials = 100;
  // Linkage: how many (TCN, camera) sightings the adversary logged.
  size_t logged_population = 1000;
  // Linkage: infected people the adversary never saw.
  size_t background_reporters = 3;
  // Self-report: random proof responses tried.
  size_t forged_proofs = 10000;
};

std::vector<std::string_view> AttackNames();

absl::StatusOr<ScenarioOutcome> RunAttack(std::string_view name,
                                          const AttackOptions& options);

// Adversary correlates logged TCNs with camera sightings and asks the server
// which of them belong to an infected person. Direct mode answers that
// outright. In PSI mode the verdict follows the counting model: each query
// covers at least min_query logged TCNs and no TCN is queried twice, so the
// best the adversary can do is narrow the infected person to one group. An
// adaptive bisection that relies on client-side padding is also run and
// reported as residual risk; with the rate limit disabled it decides the
// verdict.
absl::StatusOr<ScenarioOutcome> AttackLinkage(const AttackOptions& options);

// A relay captures a victim's TCN and rebroadcasts it elsewhere, either in a
// later interval (must not notify anyone) or within the same one (residual).
absl::StatusOr<ScenarioOutcome> AttackRebroadcast(const AttackOptions& options);

enum class ReplayTiming { kNone, kSameInterval, kLaterInterval };
sim::Scenario RebroadcastScenario(uint64_t seed, ReplayTiming timing);

// Uploads of observed TCNs without keys, and of fabricated keys.
absl::StatusOr<ScenarioOutcome> AttackForeignUpload(const AttackOptions& options);

// Reports without a TAN and with forged proofs of contact.
absl::StatusOr<ScenarioOutcome> AttackSelfReport(const AttackOptions& options);

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_ATTACKS_H_
