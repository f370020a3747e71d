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
#ifndef CTRACE_PSI_COMMUTATIVE_KEY_H_
#define CTRACE_PSI_COMMUTATIVE_KEY_H_

#include <string>

#include "absl/status/statusor.h"
#include "ctrace/common/random.h"
#include "ctrace/psi/group.h"

namespace ctrace::psi {

// Pohlig-Hellman style commutative cipher key: a secret exponent e coprime
// to q, with Enc(x) = x^e and Strip(y) = y^(e^-1 mod q). There is no public
// half; each party holds one exponent.
class CommutativeKey {
 public:
  // Exponent bits drawn by Generate(). Short exponents keep encryption cheap;
  // the inverse used for stripping is full length.
  static constexpr int kExponentBits = 256;

  static absl::StatusOr<CommutativeKey> Generate(RandomSource& rng);
  // exponent must lie in [1, q-1].
  static absl::StatusOr<CommutativeKey> FromExponent(const BIGNUM* exponent);
  static absl::StatusOr<CommutativeKey> FromHex(std::string_view hex);

  CommutativeKey(CommutativeKey&&) = default;
  CommutativeKey& operator=(CommutativeKey&&) = default;
  CommutativeKey(const CommutativeKey& other);
  CommutativeKey& operator=(const CommutativeKey& other);

  GroupElement Encrypt(const GroupElement& e) const;
  GroupElement Strip(const GroupElement& e) const;

  const BIGNUM* exponent() const { return exponent_.get(); }
  std::string ExponentHex() const;

 private:
  CommutativeKey(BigNum exponent, BigNum inverse)
      : exponent_(std::move(exponent)), inverse_(std::move(inverse)) {}

  BigNum exponent_;
  BigNum inverse_;
};

inline GroupElement CommuteEncrypt(const CommutativeKey& key,
                                   const GroupElement& e) {
  return key.Encrypt(e);
}

inline GroupElement StripLayer(const CommutativeKey& key,
                               const GroupElement& e) {
  return key.Strip(e);
}

}  // namespace ctrace::psi

#endif  // CTRACE_PSI_COMMUTATIVE_KEY_H_
