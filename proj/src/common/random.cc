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
#include "ctrace/common/random.h"

#include <openssl/rand.h>

#include <cstring>
#include <stdexcept>

namespace ctrace {

RandomSource::result_type RandomSource::operator()() {
  uint64_t v = 0;
  uint8_t buf[8];
  if (!Fill(buf).ok()) {
    throw std::runtime_error("random source failure");
  }
  std::memcpy(&v, buf, sizeof(v));
  return v;
}

uint64_t RandomSource::Uniform(uint64_t bound) {
  // Rejection sampling to avoid modulo bias.
  const uint64_t limit = max() - max() % bound;
  uint64_t v;
  do {
    v = (*this)();
  } while (v >= limit);
  return v % bound;
}

double RandomSource::UniformDouble() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

absl::Status SecureRandom::Fill(std::span<uint8_t> out) {
  if (out.empty()) return absl::OkStatus();
  if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
    return absl::InternalError("RAND_bytes failed");
  }
  return absl::OkStatus();
}

absl::Status SeededRandom::Fill(std::span<uint8_t> out) {
  size_t i = 0;
  while (i < out.size()) {
    uint64_t v = engine_();
    for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
      out[i] = static_cast<uint8_t>(v >> (8 * b));
    }
  }
  return absl::OkStatus();
}

uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the combined value.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace ctrace
