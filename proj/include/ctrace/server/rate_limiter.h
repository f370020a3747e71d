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
#ifndef CTRACE_SERVER_RATE_LIMITER_H_
#define CTRACE_SERVER_RATE_LIMITER_H_

#include <chrono>
#include <deque>
#include <map>
#include <mutex>
#include <string>

#include "ctrace/common/time.h"

namespace ctrace::server {

struct RateDecision {
  bool allowed = true;
  std::chrono::milliseconds retry_after{0};
};

// At most max_events per client token in any trailing window. A limit of
// zero or less disables limiting.
class RateLimiter {
 public:
  RateLimiter(int max_events, std::chrono::milliseconds window)
      : max_events_(max_events), window_(window) {}

  // Records an event when allowed.
  RateDecision Acquire(const std::string& token, UtcTime now);
  RateDecision Check(const std::string& token, UtcTime now) const;

  int max_events() const { return max_events_; }

 private:
  RateDecision Decide(const std::deque<UtcTime>& events, UtcTime now) const;

  int max_events_;
  std::chrono::milliseconds window_;
  mutable std::mutex mu_;
  std::map<std::string, std::deque<UtcTime>> events_;
};

}  // namespace ctrace::server

#endif  // CTRACE_SERVER_RATE_LIMITER_H_
