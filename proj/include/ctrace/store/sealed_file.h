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
#ifndef CTRACE_STORE_SEALED_FILE_H_
#define CTRACE_STORE_SEALED_FILE_H_

#include <cstdint>
#include <span>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ctrace/common/bytes.h"
#include "ctrace/common/random.h"

namespace ctrace::store {

// AES-256-GCM file envelope: "CTSEAL01" || nonce(12) || ciphertext || tag(16).
// The file key is SHA-256 over a fixed label and the caller's secret.
absl::Status WriteSealedFile(const std::string& path,
                             std::span<const uint8_t> secret,
                             std::span<const uint8_t> plaintext,
                             RandomSource& rng);
absl::StatusOr<Bytes> ReadSealedFile(const std::string& path,
                                     std::span<const uint8_t> secret);

}  // namespace ctrace::store

#endif  // CTRACE_STORE_SEALED_FILE_H_
