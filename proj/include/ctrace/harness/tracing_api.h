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
#ifndef CTRACE_HARNESS_TRACING_API_H_
#define CTRACE_HARNESS_TRACING_API_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ctrace/common/time.h"
#include "ctrace/server/json_codec.h"
#include "ctrace/server/tracing_server.h"

namespace httplib {
class Client;
}

namespace ctrace::harness {

using server::AuthorizationKind;
using server::BatchSummary;
using server::ProofChallenge;
using server::ProofResponse;
using server::PsiReply;
using server::ReleaseMode;
using server::ReportRequest;
using server::UploadAuthorization;

// What a device (or an attacker) can do against the tracing service.
class TracingApi {
 public:
  virtual ~TracingApi() = default;

  virtual absl::StatusOr<UploadAuthorization> IssueTan(
      AuthorizationKind kind, const std::string& credential) = 0;
  // Sends a report body as-is, so malformed uploads can be exercised.
  virtual absl::StatusOr<size_t> ReportJson(const nlohmann::json& body) = 0;
  virtual absl::StatusOr<std::vector<BatchSummary>> Batches(
      uint64_t since, ReleaseMode mode) = 0;
  virtual absl::StatusOr<PsiReply> PsiRound1(
      const std::string& client_token, const std::vector<uint64_t>& batch_ids,
      const std::vector<psi::GroupElement>& elements) = 0;
  virtual absl::StatusOr<PsiReply> PsiRefine(
      uint64_t session_id, const psi::ElementGroups& groups) = 0;
  virtual absl::StatusOr<ProofChallenge> ProofChallengeRequest() = 0;
  virtual absl::StatusOr<UploadAuthorization> ProofResponseRequest(
      const std::string& nonce_hex, std::span<const ProofResponse> responses) = 0;

  absl::StatusOr<size_t> Report(const ReportRequest& report) {
    return ReportJson(server::codec::ReportToJson(report));
  }
};

// Calls the server object directly, still passing reports through the JSON
// decoder so both bindings accept the same payloads.
class LocalTracingApi final : public TracingApi {
 public:
  LocalTracingApi(server::TracingServer& server, Clock clock)
      : server_(server), clock_(std::move(clock)) {}

  absl::StatusOr<UploadAuthorization> IssueTan(
      AuthorizationKind kind, const std::string& credential) override;
  absl::StatusOr<size_t> ReportJson(const nlohmann::json& body) override;
  absl::StatusOr<std::vector<BatchSummary>> Batches(uint64_t since,
                                                    ReleaseMode mode) override;
  absl::StatusOr<PsiReply> PsiRound1(
      const std::string& client_token, const std::vector<uint64_t>& batch_ids,
      const std::vector<psi::GroupElement>& elements) override;
  absl::StatusOr<PsiReply> PsiRefine(uint64_t session_id,
                                     const psi::ElementGroups& groups) override;
  absl::StatusOr<ProofChallenge> ProofChallengeRequest() override;
  absl::StatusOr<UploadAuthorization> ProofResponseRequest(
      const std::string& nonce_hex,
      std::span<const ProofResponse> responses) override;

 private:
  server::TracingServer& server_;
  Clock clock_;
};

// Talks to an HttpFrontend. Error bodies are mapped back to statuses,
// including the retry-after hint.
class HttpTracingApi final : public TracingApi {
 public:
  HttpTracingApi(const std::string& host, int port);
  ~HttpTracingApi() override;

  absl::StatusOr<UploadAuthorization> IssueTan(
      AuthorizationKind kind, const std::string& credential) override;
  absl::StatusOr<size_t> ReportJson(const nlohmann::json& body) override;
  absl::StatusOr<std::vector<BatchSummary>> Batches(uint64_t since,
                                                    ReleaseMode mode) override;
  absl::StatusOr<PsiReply> PsiRound1(
      const std::string& client_token, const std::vector<uint64_t>& batch_ids,
      const std::vector<psi::GroupElement>& elements) override;
  absl::StatusOr<PsiReply> PsiRefine(uint64_t session_id,
                                     const psi::ElementGroups& groups) override;
  absl::StatusOr<ProofChallenge> ProofChallengeRequest() override;
  absl::StatusOr<UploadAuthorization> ProofResponseRequest(
      const std::string& nonce_hex,
      std::span<const ProofResponse> responses) override;

 private:
  absl::StatusOr<nlohmann::json> Post(const std::string& path,
                                      const nlohmann::json& body,
                                      const std::string& bearer = "");
  absl::StatusOr<nlohmann::json> Get(const std::string& path);

  std::unique_ptr<httplib::Client> client_;
};

}  // namespace ctrace::harness

#endif  // CTRACE_HARNESS_TRACING_API_H_
