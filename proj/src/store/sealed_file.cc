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
#include "ctrace/store/sealed_file.h"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>

#include "ctrace/common/random.h"

namespace ctrace::store {
namespace {

constexpr char kMagic[] = "CTSEAL01";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;
constexpr size_t kNonceLen = 12;
constexpr size_t kTagLen = 16;

using CipherCtx =
    std::unique_ptr<EVP_CIPHER_CTX, decltype(&EVP_CIPHER_CTX_free)>;

std::array<uint8_t, 32> FileKey(std::span<const uint8_t> secret) {
  return Sha256({AsBytes("ctrace-sealed-file-v1"), secret});
}

}  // namespace

absl::Status WriteSealedFile(const std::string& path,
                             std::span<const uint8_t> secret,
                             std::span<const uint8_t> plaintext,
                             RandomSource& rng) {
  auto key = FileKey(secret);
  std::array<uint8_t, kNonceLen> nonce{};
  absl::Status st = rng.Fill(nonce);
  if (!st.ok()) return st;

  Bytes out(kMagicLen + kNonceLen + plaintext.size() + kTagLen);
  std::copy(kMagic, kMagic + kMagicLen, out.begin());
  std::copy(nonce.begin(), nonce.end(), out.begin() + kMagicLen);

  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  int len = 0;
  uint8_t* body = out.data() + kMagicLen + kNonceLen;
  bool ok =
      EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce.data()) == 1 &&
      EVP_EncryptUpdate(ctx.get(), body, &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) == 1 &&
      EVP_EncryptFinal_ex(ctx.get(), body + len, &len) == 1 &&
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagLen,
                          body + plaintext.size()) == 1;
  SecureWipe(key);
  if (!ok) return absl::InternalError("AES-GCM encryption failed");

  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) return absl::UnavailableError("cannot open " + tmp);
    f.write(reinterpret_cast<const char*>(out.data()),
            static_cast<std::streamsize>(out.size()));
    if (!f) return absl::UnavailableError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) return absl::UnavailableError("rename failed: " + ec.message());
  return absl::OkStatus();
}

absl::StatusOr<Bytes> ReadSealedFile(const std::string& path,
                                     std::span<const uint8_t> secret) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return absl::NotFoundError("cannot open " + path);
  Bytes data((std::istreambuf_iterator<char>(f)),
             std::istreambuf_iterator<char>());
  if (data.size() < kMagicLen + kNonceLen + kTagLen ||
      !std::equal(kMagic, kMagic + kMagicLen, data.begin())) {
    return absl::DataLossError("not a sealed store file: " + path);
  }
  const uint8_t* nonce = data.data() + kMagicLen;
  const uint8_t* body = nonce + kNonceLen;
  size_t body_len = data.size() - kMagicLen - kNonceLen - kTagLen;
  Bytes tag(body + body_len, body + body_len + kTagLen);

  auto key = FileKey(secret);
  Bytes plain(body_len);
  CipherCtx ctx(EVP_CIPHER_CTX_new(), &EVP_CIPHER_CTX_free);
  int len = 0;
  bool ok =
      EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, key.data(),
                         nonce) == 1 &&
      EVP_DecryptUpdate(ctx.get(), plain.data(), &len, body,
                        static_cast<int>(body_len)) == 1 &&
      EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagLen,
                          tag.data()) == 1 &&
      EVP_DecryptFinal_ex(ctx.get(), plain.data() + len, &len) == 1;
  SecureWipe(key);
  if (!ok) {
    SecureWipe(plain);
    return absl::PermissionDeniedError(
        "sealed file authentication failed (wrong secret or corrupted)");
  }
  return plain;
}

}  // namespace ctrace::store
