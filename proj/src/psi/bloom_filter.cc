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
#include "ctrace/psi/bloom_filter.h"

#include <algorithm>
#include <bit>
#include <cmath>

namespace ctrace::psi {
namespace {

uint64_t LoadBe64(const uint8_t* p) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = v << 8 | p[i];
  return v;
}

void StoreBe64(uint64_t v, uint8_t* p) {
  for (int i = 7; i >= 0; --i) {
    p[i] = static_cast<uint8_t>(v);
    v >>= 8;
  }
}

constexpr size_t kHeaderSize = 8 + 1 + 8;

}  // namespace

std::vector<uint64_t> BloomFilter::Positions(const GroupElement& e) const {
  std::vector<uint64_t> out;
  out.reserve(k_);
  for (uint8_t block = 0; out.size() < static_cast<size_t>(k_); ++block) {
    const uint8_t counter[1] = {block};
    auto d = Sha256({AsBytes("ctrace-bloom"), counter, e.bytes});
    for (size_t off = 0; off < d.size() && out.size() < static_cast<size_t>(k_);
         off += 8) {
      out.push_back(LoadBe64(d.data() + off) % m_);
    }
  }
  return out;
}

uint64_t BloomFilter::BitsFor(uint64_t n_capacity, int k) {
  return static_cast<uint64_t>(
      std::ceil(static_cast<double>(n_capacity) * k / std::log(2.0)));
}

BloomFilter BloomFilter::ForCapacity(uint64_t n_capacity, int k) {
  return BloomFilter(BitsFor(n_capacity, k), k, n_capacity);
}

void BloomFilter::Insert(const GroupElement& e) {
  ++inserted_;
  if (m_ == 0) return;
  for (uint64_t i : Positions(e)) SetBit(i);
}

bool BloomFilter::MayContain(const GroupElement& e) const {
  if (m_ == 0) return false;
  for (uint64_t i : Positions(e)) {
    if (!TestBit(i)) return false;
  }
  return true;
}

double BloomFilter::ExpectedFalsePositiveRate() const {
  if (m_ == 0) return 0.0;
  return std::pow(1.0 - std::exp(-static_cast<double>(k_) * inserted_ / m_),
                  k_);
}

Bytes BloomFilter::Encode() const {
  Bytes out(kHeaderSize + bits_.size());
  StoreBe64(m_, out.data());
  out[8] = static_cast<uint8_t>(k_);
  StoreBe64(n_capacity_, out.data() + 9);
  std::copy(bits_.begin(), bits_.end(), out.begin() + kHeaderSize);
  return out;
}

absl::StatusOr<BloomFilter> BloomFilter::Decode(std::span<const uint8_t> wire) {
  if (wire.size() < kHeaderSize) {
    return absl::InvalidArgumentError("bloom filter header truncated");
  }
  uint64_t m = LoadBe64(wire.data());
  int k = wire[8];
  uint64_t n = LoadBe64(wire.data() + 9);
  if (k == 0) return absl::InvalidArgumentError("bloom filter has k = 0");
  if (wire.size() - kHeaderSize != (m + 7) / 8) {
    return absl::InvalidArgumentError("bloom filter bit array has wrong size");
  }
  BloomFilter f(m, k, n);
  std::copy(wire.begin() + kHeaderSize, wire.end(), f.bits_.begin());
  // Approximate fill from the set-bit count so the FPR estimate survives
  // transport.
  uint64_t ones = 0;
  for (uint8_t b : f.bits_) ones += std::popcount(b);
  if (m > 0 && ones < m) {
    f.inserted_ = static_cast<uint64_t>(std::llround(
        -static_cast<double>(m) / k *
        std::log(1.0 - static_cast<double>(ones) / m)));
  } else {
    f.inserted_ = n;
  }
  return f;
}

ExactSetFilter::ExactSetFilter(std::vector<GroupElement> elements)
    : elements_(std::move(elements)) {
  std::sort(elements_.begin(), elements_.end());
}

void ExactSetFilter::Insert(const GroupElement& e) {
  elements_.insert(std::upper_bound(elements_.begin(), elements_.end(), e), e);
}

bool ExactSetFilter::MayContain(const GroupElement& e) const {
  return std::binary_search(elements_.begin(), elements_.end(), e);
}

}  // namespace ctrace::psi
