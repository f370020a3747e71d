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
#ifndef CTRACE_COMMON_RANDOM_H_
#define CTRACE_COMMON_RANDOM_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <random>
#include <span>

#include "absl/status/status.h"

namespace ctrace {

// Source of random bytes. Also usable as a UniformRandomBitGenerator so it
// can drive std::shuffle and <random> distributions.
class RandomSource {
 public:
  using result_type = uint64_t;

  virtual ~RandomSource() = default;

  virtual absl::Status Fill(std::span<uint8_t> out) = 0;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  // Uniform in [0, bound). bound must be positive.
  uint64_t Uniform(uint64_t bound);
  // Uniform in [0, 1).
  double UniformDouble();
};

// Operating-system CSPRNG (OpenSSL RAND_bytes).
class SecureRandom final : public RandomSource {
 public:
  absl::Status Fill(std::span<uint8_t> out) override;
};

// Deterministic generator for simulation and tests. Not for key material in
// production.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(uint64_t seed) : engine_(seed) {}
  absl::Status Fill(std::span<uint8_t> out) override;

 private:
  std::mt19937_64 engine_;
};

// Mixes a seed with a stream label so derived generators are independent.
// Serializes access to another source so it can be shared across threads.
class LockedRandom final : public RandomSource {
 public:
  explicit LockedRandom(std::unique_ptr<RandomSource> inner)
      : inner_(std::move(inner)) {}
  absl::Status Fill(std::span<uint8_t> out) override {
    std::lock_guard lock(mu_);
    return inner_->Fill(out);
  }

 private:
  std::mutex mu_;
  std::unique_ptr<RandomSource> inner_;
};

uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

}  // namespace ctrace

#endif  // CTRACE_COMMON_RANDOM_H_
