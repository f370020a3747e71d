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
#ifndef CTRACE_PSI_GROUP_H_
#define CTRACE_PSI_GROUP_H_

#include <openssl/bn.h>

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "absl/status/statusor.h"
#include "ctrace/tcn/tcn.h"

namespace ctrace::psi {

inline constexpr size_t kElementSize = 256;

struct BnDeleter {
  void operator()(BIGNUM* bn) const { BN_clear_free(bn); }
};
using BigNum = std::unique_ptr<BIGNUM, BnDeleter>;

BigNum NewBigNum();
BigNum BigNumFromBytes(std::span<const uint8_t> big_endian);
// Per-thread scratch context; BN_CTX is not thread-safe.
BN_CTX* ThreadBnCtx();

// Element of the order-q subgroup of quadratic residues modulo the 2048-bit
// safe prime p = 2q + 1, stored as a fixed-width big-endian integer. This is
// also its wire encoding.
struct GroupElement {
  std::array<uint8_t, kElementSize> bytes{};

  std::string Hex() const { return HexEncode(bytes); }
  // Range and quadratic-residue check (Jacobi symbol); no exponentiation.
  static absl::StatusOr<GroupElement> FromBytes(std::span<const uint8_t> data);
  static absl::StatusOr<GroupElement> FromHex(std::string_view hex);

  auto operator<=>(const GroupElement&) const = default;
};

// The 2048-bit MODP group of RFC 3526 (group 14). Immutable after
// construction and shared across threads.
class PrimeGroup {
 public:
  static const PrimeGroup& Default();

  const BIGNUM* p() const { return p_.get(); }
  const BIGNUM* q() const { return q_.get(); }

  GroupElement Exp(const GroupElement& base, const BIGNUM* exponent) const;
  // Exact membership test: value in [2, p-1] and value^q == 1 mod p.
  bool IsMember(const GroupElement& e) const;
  // Cheap structural test used on untrusted input.
  bool LooksValid(const GroupElement& e) const;

  GroupElement ToElement(const BIGNUM* value) const;

 private:
  PrimeGroup();

  BigNum p_;
  BigNum q_;
  std::unique_ptr<BN_MONT_CTX, decltype(&BN_MONT_CTX_free)> mont_;
};

// Maps a ceTCN into the subgroup: expand with SHA-256 to 2176 bits, reduce
// mod p, square. Re-hashes with a counter in the (negligible) case the
// result is 0 or 1.
GroupElement HashToGroup(const tcn::ContactEventTcn& ce_tcn);

}  // namespace ctrace::psi

#endif  // CTRACE_PSI_GROUP_H_
