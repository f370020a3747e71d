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
#include "ctrace/psi/commutative_key.h"

#include <openssl/crypto.h>

#include "ctrace/common/status_macros.h"

namespace ctrace::psi {
namespace {

BigNum Dup(const BIGNUM* bn) {
  BigNum out(BN_dup(bn));
  if (!out) throw std::bad_alloc();
  return out;
}

}  // namespace

absl::StatusOr<CommutativeKey> CommutativeKey::FromExponent(
    const BIGNUM* exponent) {
  const PrimeGroup& group = PrimeGroup::Default();
  if (BN_is_zero(exponent) || BN_is_negative(exponent) ||
      BN_cmp(exponent, group.q()) >= 0) {
    return absl::InvalidArgumentError("exponent outside [1, q-1]");
  }
  BigNum inverse(BN_mod_inverse(nullptr, exponent, group.q(), ThreadBnCtx()));
  if (!inverse) {
    return absl::InvalidArgumentError("exponent has no inverse mod q");
  }
  return CommutativeKey(Dup(exponent), std::move(inverse));
}

absl::StatusOr<CommutativeKey> CommutativeKey::Generate(RandomSource& rng) {
  std::array<uint8_t, kExponentBits / 8> buf{};
  while (true) {
    RETURN_IF_ERROR(rng.Fill(buf));
    BigNum e = BigNumFromBytes(buf);
    SecureWipe(buf);
    // q is prime, so every exponent in [2, 2^256) is invertible.
    if (BN_cmp(e.get(), BN_value_one()) > 0) return FromExponent(e.get());
  }
}

absl::StatusOr<CommutativeKey> CommutativeKey::FromHex(std::string_view hex) {
  ASSIGN_OR_RETURN(Bytes bytes, HexDecode(hex));
  BigNum e = BigNumFromBytes(bytes);
  SecureWipe(bytes);
  return FromExponent(e.get());
}

CommutativeKey::CommutativeKey(const CommutativeKey& other)
    : exponent_(Dup(other.exponent_.get())),
      inverse_(Dup(other.inverse_.get())) {}

CommutativeKey& CommutativeKey::operator=(const CommutativeKey& other) {
  if (this != &other) {
    exponent_ = Dup(other.exponent_.get());
    inverse_ = Dup(other.inverse_.get());
  }
  return *this;
}

GroupElement CommutativeKey::Encrypt(const GroupElement& e) const {
  return PrimeGroup::Default().Exp(e, exponent_.get());
}

GroupElement CommutativeKey::Strip(const GroupElement& e) const {
  return PrimeGroup::Default().Exp(e, inverse_.get());
}

std::string CommutativeKey::ExponentHex() const {
  char* hex = BN_bn2hex(exponent_.get());
  std::string out(hex);
  OPENSSL_free(hex);
  for (char& c : out) c = static_cast<char>(std::tolower(c));
  return out;
}

}  // namespace ctrace::psi
