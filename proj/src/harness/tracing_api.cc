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
#include "ctrace/harness/tracing_api.h"

#include "ctrace/common/status_macros.h"
#include "httplib.h"

namespace ctrace::harness {

using server::codec::json;

absl::StatusOr<UploadAuthorization> LocalTracingApi::IssueTan(
    AuthorizationKind kind, const std::string& credential) {
  return server_.IssueTan(kind, credential, clock_());
}

absl::StatusOr<size_t> LocalTracingApi::ReportJson(const json& body) {
  ASSIGN_OR_RETURN(auto report, server::codec::ReportFromJson(body));
  return server_.AcceptReport(report, clock_());
}

absl::StatusOr<std::vector<BatchSummary>> LocalTracingApi::Batches(
    uint64_t since, ReleaseMode mode) {
  return server_.ReleaseBatches(since, mode);
}

absl::StatusOr<PsiReply> LocalTracingApi::PsiRound1(
    const std::string& client_token, const std::vector<uint64_t>& batch_ids,
    const std::vector<psi::GroupElement>& elements) {
  psi::ElementGroups groups = {elements};
  return server_.PsiRound1(client_token, batch_ids, groups, clock_());
}

absl::StatusOr<PsiReply> LocalTracingApi::PsiRefine(
    uint64_t session_id, const psi::ElementGroups& groups) {
  return server_.PsiRefine(session_id, groups, clock_());
}

absl::StatusOr<ProofChallenge> LocalTracingApi::ProofChallengeRequest() {
  return server_.IssueProofChallenge(clock_());
}

absl::StatusOr<UploadAuthorization> LocalTracingApi::ProofResponseRequest(
    const std::string& nonce_hex, std::span<const ProofResponse> responses) {
  return server_.VerifyContactProof(nonce_hex, responses, clock_());
}

HttpTracingApi::HttpTracingApi(const std::string& host, int port)
    : client_(std::make_unique<httplib::Client>(host, port)) {
  client_->set_read_timeout(300, 0);
  client_->set_write_timeout(300, 0);
}

HttpTracingApi::~HttpTracingApi() = default;

namespace {

absl::StatusOr<json> Decode(const httplib::Result& result) {
  if (!result) {
    return absl::UnavailableError("request failed: " +
                                  httplib::to_string(result.error()));
  }
  json body = json::parse(result->body, nullptr, false);
  if (body.is_discarded()) {
    return absl::DataLossError("response is not JSON (HTTP " +
                               std::to_string(result->status) + ")");
  }
  if (result->status != 200) {
    return server::codec::StatusFromJson(body, result->status);
  }
  return body;
}

}  // namespace

absl::StatusOr<json> HttpTracingApi::Post(const std::string& path,
                                          const json& body,
                                          const std::string& bearer) {
  httplib::Headers headers;
  if (!bearer.empty()) headers.emplace("Authorization", "Bearer " + bearer);
  return Decode(client_->Post(path, headers, body.dump(), "application/json"));
}

absl::StatusOr<json> HttpTracingApi::Get(const std::string& path) {
  return Decode(client_->Get(path));
}

absl::StatusOr<UploadAuthorization> HttpTracingApi::IssueTan(
    AuthorizationKind kind, const std::string& credential) {
  ASSIGN_OR_RETURN(json body,
                   Post("/v1/tan",
                        json{{"kind", std::string(server::AuthorizationKindName(kind))}},
                        credential));
  return server::codec::AuthorizationFromJson(body);
}

absl::StatusOr<size_t> HttpTracingApi::ReportJson(const json& body) {
  ASSIGN_OR_RETURN(json reply, Post("/v1/report", body));
  if (!reply.contains("accepted_ce_tcns") ||
      !reply["accepted_ce_tcns"].is_number_unsigned()) {
    return absl::DataLossError("report reply lacks accepted_ce_tcns");
  }
  return reply["accepted_ce_tcns"].get<size_t>();
}

absl::StatusOr<std::vector<BatchSummary>> HttpTracingApi::Batches(
    uint64_t since, ReleaseMode mode) {
  ASSIGN_OR_RETURN(json reply,
                   Get("/v1/batches?since=" + std::to_string(since) + "&mode=" +
                       (mode == ReleaseMode::kPsi ? "psi" : "direct")));
  if (!reply.contains("batches") || !reply["batches"].is_array()) {
    return absl::DataLossError("batches reply lacks a batch list");
  }
  std::vector<BatchSummary> out;
  for (const auto& b : reply["batches"]) {
    ASSIGN_OR_RETURN(auto summary, server::codec::SummaryFromJson(b));
    out.push_back(std::move(summary));
  }
  return out;
}

absl::StatusOr<PsiReply> HttpTracingApi::PsiRound1(
    const std::string& client_token, const std::vector<uint64_t>& batch_ids,
    const std::vector<psi::GroupElement>& elements) {
  json body = {{"client_token", client_token},
               {"batch_ids", batch_ids},
               {"elements", server::codec::GroupToJson(elements)}};
  ASSIGN_OR_RETURN(json reply, Post("/v1/psi/round1", body));
  return server::codec::PsiReplyFromJson(reply);
}

absl::StatusOr<PsiReply> HttpTracingApi::PsiRefine(
    uint64_t session_id, const psi::ElementGroups& groups) {
  json g = json::array();
  for (const auto& group : groups) g.push_back(server::codec::GroupToJson(group));
  ASSIGN_OR_RETURN(json reply,
                   Post("/v1/psi/refine", json{{"session_id", session_id}, {"groups", g}}));
  return server::codec::PsiReplyFromJson(reply);
}

absl::StatusOr<ProofChallenge> HttpTracingApi::ProofChallengeRequest() {
  ASSIGN_OR_RETURN(json reply, Post("/v1/proof/challenge", json::object()));
  return server::codec::ChallengeFromJson(reply);
}

absl::StatusOr<UploadAuthorization> HttpTracingApi::ProofResponseRequest(
    const std::string& nonce_hex, std::span<const ProofResponse> responses) {
  json r = json::array();
  for (const auto& resp : responses) r.push_back(HexEncode(resp));
  ASSIGN_OR_RETURN(json reply,
                   Post("/v1/proof/response", json{{"nonce", nonce_hex}, {"responses", r}}));
  return server::codec::AuthorizationFromJson(reply);
}

}  // namespace ctrace::harness
