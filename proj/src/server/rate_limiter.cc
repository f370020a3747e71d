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
#include "ctrace/server/rate_limiter.h"

namespace ctrace::server {

RateDecision RateLimiter::Decide(const std::deque<UtcTime>& events,
                                 UtcTime now) const {
  size_t live = 0;
  for (UtcTime t : events) {
    if (t + window_ > now) ++live;
  }
  if (static_cast<int>(live) < max_events_) return {};
  // The oldest live event has to age out first.
  UtcTime oldest = events[events.size() - live];
  return {false, oldest + window_ - now};
}

RateDecision RateLimiter::Acquire(const std::string& token, UtcTime now) {
  if (max_events_ <= 0) return {};
  std::lock_guard lock(mu_);
  auto& events = events_[token];
  while (!events.empty() && events.front() + window_ <= now) {
    events.pop_front();
  }
  RateDecision d = Decide(events, now);
  if (d.allowed) events.push_back(now);
  return d;
}

RateDecision RateLimiter::Check(const std::string& token, UtcTime now) const {
  if (max_events_ <= 0) return {};
  std::lock_guard lock(mu_);
  auto it = events_.find(token);
  if (it == events_.end()) return {};
  return Decide(it->second, now);
}

}  // namespace ctrace::server
