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
#ifndef CTRACE_SERVER_JSON_CODEC_H_
#define CTRACE_SERVER_JSON_CODEC_H_

#include <span>

#include "absl/status/statusor.h"
#include "ctrace/server/tracing_server.h"
#include "json.hpp"

// JSON shapes shared by the HTTP frontend and its client. Hex is lowercase,
// dates are ISO-8601, group elements are 256-byte big-endian hex.
namespace ctrace::server::codec {

using nlohmann::json;

// {code, message, retry_after?}; retry_after in seconds.
json StatusToJson(const absl::Status& status);
absl::Status StatusFromJson(const json& body, int http_status);
int HttpStatusFor(absl::StatusCode code);

json AuthorizationToJson(const UploadAuthorization& auth);
absl::StatusOr<UploadAuthorization> AuthorizationFromJson(const json& body);

json ReportToJson(const ReportRequest& report);
// Rejects payloads that carry contact numbers without keys.
absl::StatusOr<ReportRequest> ReportFromJson(const json& body);

json SummaryToJson(const BatchSummary& summary);
absl::StatusOr<BatchSummary> SummaryFromJson(const json& body);

json GroupToJson(std::span<const psi::GroupElement> group);
absl::StatusOr<std::vector<psi::GroupElement>> GroupFromJson(const json& body);

json PsiReplyToJson(const PsiReply& reply);
absl::StatusOr<PsiReply> PsiReplyFromJson(const json& body);

json ChallengeToJson(const ProofChallenge& challenge);
absl::StatusOr<ProofChallenge> ChallengeFromJson(const json& body);

}  // namespace ctrace::server::codec

#endif  // CTRACE_SERVER_JSON_CODEC_H_
