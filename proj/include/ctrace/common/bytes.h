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
#ifndef CTRACE_COMMON_BYTES_H_
#define CTRACE_COMMON_BYTES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace ctrace {

using Bytes = std::vector<uint8_t>;

// Lowercase hex, no prefix.
std::string HexEncode(std::span<const uint8_t> data);

// Accepts lowercase or uppercase digits; rejects odd lengths and stray
// characters.
absl::StatusOr<Bytes> HexDecode(std::string_view hex);

template <size_t N>
absl::StatusOr<std::array<uint8_t, N>> HexDecodeFixed(std::string_view hex) {
  if (hex.size() != 2 * N) {
    return absl::InvalidArgumentError("hex string has length " +
                                      std::to_string(hex.size()) +
                                      ", expected " + std::to_string(2 * N));
  }
  auto bytes = HexDecode(hex);
  if (!bytes.ok()) return bytes.status();
  std::array<uint8_t, N> out{};
  for (size_t i = 0; i < N; ++i) out[i] = (*bytes)[i];
  return out;
}

// SHA-256 over the concatenation of the given parts.
std::array<uint8_t, 32> Sha256(std::initializer_list<std::span<const uint8_t>> parts);

// HMAC-SHA256(key, message).
std::array<uint8_t, 32> HmacSha256(std::span<const uint8_t> key,
                                   std::span<const uint8_t> message);

inline std::span<const uint8_t> AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

// Overwrites the buffer in a way the optimizer will not elide.
void SecureWipe(std::span<uint8_t> data);

}  // namespace ctrace

#endif  // CTRACE_COMMON_BYTES_H_
