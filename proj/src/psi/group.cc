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
#include "ctrace/psi/group.h"

#include <stdexcept>

namespace ctrace::psi {
namespace {

constexpr char kModpGroup14[] =
    "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD1"
    "29024E088A67CC74020BBEA63B139B22514A08798E3404DD"
    "EF9519B3CD3A431B302B0A6DF25F14374FE1356D6D51C245"
    "E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
    "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3D"
    "C2007CB8A163BF0598DA48361C55D39A69163FA8FD24CF5F"
    "83655D23DCA3AD961C62F356208552BB9ED529077096966D"
    "670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
    "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9"
    "DE2BCBF6955817183995497CEA956AE515D2261898FA0510"
    "15728E5A8AACAA68FFFFFFFFFFFFFFFF";

void CheckOk(int rc, const char* what) {
  if (rc != 1) throw std::runtime_error(what);
}

}  // namespace

BigNum NewBigNum() {
  BigNum bn(BN_new());
  if (!bn) throw std::bad_alloc();
  return bn;
}

BigNum BigNumFromBytes(std::span<const uint8_t> big_endian) {
  BigNum bn(BN_bin2bn(big_endian.data(), static_cast<int>(big_endian.size()),
                      nullptr));
  if (!bn) throw std::bad_alloc();
  return bn;
}

BN_CTX* ThreadBnCtx() {
  thread_local std::unique_ptr<BN_CTX, decltype(&BN_CTX_free)> ctx(
      BN_CTX_new(), &BN_CTX_free);
  return ctx.get();
}

absl::StatusOr<GroupElement> GroupElement::FromBytes(
    std::span<const uint8_t> data) {
  if (data.size() != kElementSize) {
    return absl::InvalidArgumentError("group element must be 256 bytes");
  }
  GroupElement e;
  std::copy(data.begin(), data.end(), e.bytes.begin());
  if (!PrimeGroup::Default().LooksValid(e)) {
    return absl::InvalidArgumentError("value is not a subgroup element");
  }
  return e;
}

absl::StatusOr<GroupElement> GroupElement::FromHex(std::string_view hex) {
  auto bytes = HexDecodeFixed<kElementSize>(hex);
  if (!bytes.ok()) return bytes.status();
  return FromBytes(*bytes);
}

const PrimeGroup& PrimeGroup::Default() {
  static const PrimeGroup* group = new PrimeGroup();
  return *group;
}

PrimeGroup::PrimeGroup() : mont_(BN_MONT_CTX_new(), &BN_MONT_CTX_free) {
  BIGNUM* p = nullptr;
  if (BN_hex2bn(&p, kModpGroup14) == 0) throw std::runtime_error("bad prime");
  p_.reset(p);
  q_ = NewBigNum();
  CheckOk(BN_rshift1(q_.get(), p_.get()), "BN_rshift1");
  CheckOk(BN_MONT_CTX_set(mont_.get(), p_.get(), ThreadBnCtx()),
          "BN_MONT_CTX_set");
}

GroupElement PrimeGroup::ToElement(const BIGNUM* value) const {
  GroupElement e;
  CheckOk(BN_bn2binpad(value, e.bytes.data(), kElementSize) == kElementSize,
          "BN_bn2binpad");
  return e;
}

GroupElement PrimeGroup::Exp(const GroupElement& base,
                             const BIGNUM* exponent) const {
  BigNum b = BigNumFromBytes(base.bytes);
  BigNum r = NewBigNum();
  CheckOk(BN_mod_exp_mont(r.get(), b.get(), exponent, p_.get(), ThreadBnCtx(),
                          mont_.get()),
          "BN_mod_exp_mont");
  return ToElement(r.get());
}

bool PrimeGroup::LooksValid(const GroupElement& e) const {
  BigNum v = BigNumFromBytes(e.bytes);
  if (BN_cmp(v.get(), BN_value_one()) <= 0 || BN_cmp(v.get(), p_.get()) >= 0) {
    return false;
  }
  return BN_kronecker(v.get(), p_.get(), ThreadBnCtx()) == 1;
}

bool PrimeGroup::IsMember(const GroupElement& e) const {
  if (!LooksValid(e)) return false;
  BigNum v = BigNumFromBytes(e.bytes);
  BigNum r = NewBigNum();
  CheckOk(BN_mod_exp_mont(r.get(), v.get(), q_.get(), p_.get(), ThreadBnCtx(),
                          mont_.get()),
          "BN_mod_exp_mont");
  return BN_is_one(r.get());
}

GroupElement HashToGroup(const tcn::ContactEventTcn& ce_tcn) {
  const PrimeGroup& group = PrimeGroup::Default();
  BN_CTX* ctx = ThreadBnCtx();
  // 8 extra bytes beyond |p| keep the reduction bias below 2^-64.
  constexpr size_t kBlocks = (kElementSize + 8 + 31) / 32;
  for (uint8_t attempt = 0;; ++attempt) {
    std::array<uint8_t, kBlocks * 32> wide{};
    for (uint8_t block = 0; block < kBlocks; ++block) {
      const uint8_t suffix[2] = {attempt, block};
      auto digest =
          Sha256({AsBytes("ctrace-hash-to-group"), ce_tcn.span(), suffix});
      std::copy(digest.begin(), digest.end(), wide.begin() + 32 * block);
    }
    BigNum x = BigNumFromBytes(wide);
    CheckOk(BN_nnmod(x.get(), x.get(), group.p(), ctx), "BN_nnmod");
    BigNum sq = NewBigNum();
    CheckOk(BN_mod_sqr(sq.get(), x.get(), group.p(), ctx), "BN_mod_sqr");
    if (BN_is_zero(sq.get()) || BN_is_one(sq.get())) continue;
    return group.ToElement(sq.get());
  }
}

}  // namespace ctrace::psi
