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
#ifndef CTRACE_PSI_BLOOM_FILTER_H_
#define CTRACE_PSI_BLOOM_FILTER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/bytes.h"
#include "ctrace/psi/group.h"

namespace ctrace::psi {

class MembershipFilter {
 public:
  virtual ~MembershipFilter() = default;
  virtual bool MayContain(const GroupElement& e) const = 0;
  // Probability that an element never inserted is reported present.
  virtual double FalsePositiveRate() const = 0;
};

// Bloom filter over group elements. Index i of element x is
// (h1 + i*h2) mod m, computed without overflow, where h1 and h2 are the first
// two big-endian 64-bit words of SHA-256("ctrace-bloom" || x) and h2 is
// forced odd.
//
// Wire format: u64 m | u8 k | u64 n_capacity (big-endian), then ceil(m/8)
// bytes of bits, most significant bit first.
class BloomFilter final : public MembershipFilter {
 public:
  static constexpr int kDefaultHashCount = 20;

  // m = ceil(n * k / ln 2), the size that minimises the false-positive rate
  // at n elements for k hashes.
  static BloomFilter ForCapacity(uint64_t n_capacity,
                                 int k = kDefaultHashCount);
  static uint64_t BitsFor(uint64_t n_capacity, int k);

  void Insert(const GroupElement& e);
  bool MayContain(const GroupElement& e) const override;
  double FalsePositiveRate() const override {
    return ExpectedFalsePositiveRate();
  }

  uint64_t bit_count() const { return m_; }
  int hash_count() const { return k_; }
  uint64_t capacity() const { return n_capacity_; }
  uint64_t inserted() const { return inserted_; }

  // (1 - e^{-k n / m})^k at the current fill.
  double ExpectedFalsePositiveRate() const;

  Bytes Encode() const;
  static absl::StatusOr<BloomFilter> Decode(std::span<const uint8_t> wire);

  bool operator==(const BloomFilter& other) const {
    return m_ == other.m_ && k_ == other.k_ &&
           n_capacity_ == other.n_capacity_ && bits_ == other.bits_;
  }

 private:
  BloomFilter(uint64_t m, int k, uint64_t n)
      : m_(m), k_(k), n_capacity_(n), bits_((m + 7) / 8, 0) {}

  // k bit positions, each from its own 64-bit slice of
  // SHA-256("ctrace-bloom" || u8 block || element).
  std::vector<uint64_t> Positions(const GroupElement& e) const;
  bool TestBit(uint64_t i) const { return bits_[i >> 3] & (0x80 >> (i & 7)); }
  void SetBit(uint64_t i) { bits_[i >> 3] |= static_cast<uint8_t>(0x80 >> (i & 7)); }

  uint64_t m_;
  int k_;
  uint64_t n_capacity_;
  uint64_t inserted_ = 0;
  std::vector<uint8_t> bits_;
};

// Exact membership; stands in for the Bloom filter in tests that need
// cardinalities without false positives.
class ExactSetFilter final : public MembershipFilter {
 public:
  ExactSetFilter() = default;
  explicit ExactSetFilter(std::vector<GroupElement> elements);
  void Insert(const GroupElement& e);
  bool MayContain(const GroupElement& e) const override;
  double FalsePositiveRate() const override { return 0.0; }
  size_t size() const { return elements_.size(); }

 private:
  std::vector<GroupElement> elements_;  // kept sorted
};

}  // namespace ctrace::psi

#endif  // CTRACE_PSI_BLOOM_FILTER_H_
