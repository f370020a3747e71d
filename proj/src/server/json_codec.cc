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
#include "ctrace/server/json_codec.h"

#include "ctrace/common/status_macros.h"

namespace ctrace::server::codec {
namespace {

absl::StatusOr<std::string> StringField(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) || !body[name].is_string()) {
    return absl::InvalidArgumentError(std::string("missing string field '") +
                                      name + "'");
  }
  return body[name].get<std::string>();
}

absl::StatusOr<uint64_t> UintField(const json& body, const char* name) {
  if (!body.is_object() || !body.contains(name) ||
      !body[name].is_number_unsigned()) {
    return absl::InvalidArgumentError(std::string("missing integer field '") +
                                      name + "'");
  }
  return body[name].get<uint64_t>();
}

absl::StatusOr<std::vector<tcn::ContactEventTcn>> CeListFromJson(
    const json& body) {
  if (!body.is_array()) return absl::InvalidArgumentError("expected a list");
  std::vector<tcn::ContactEventTcn> out;
  out.reserve(body.size());
  for (const auto& item : body) {
    if (!item.is_string()) return absl::InvalidArgumentError("expected hex");
    ASSIGN_OR_RETURN(auto ce, tcn::ContactEventTcn::FromHex(item.get<std::string>()));
    out.push_back(ce);
  }
  return out;
}

json CeListToJson(std::span<const tcn::ContactEventTcn> list) {
  json out = json::array();
  for (const auto& ce : list) out.push_back(ce.Hex());
  return out;
}

}  // namespace

json StatusToJson(const absl::Status& status) {
  json body = {{"code", absl::StatusCodeToString(status.code())},
               {"message", std::string(status.message())}};
  if (auto retry = RetryAfterOf(status)) {
    body["retry_after"] = (retry->count() + 999) / 1000;
  }
  return body;
}

absl::Status StatusFromJson(const json& body, int http_status) {
  absl::StatusCode code = absl::StatusCode::kUnknown;
  std::string message = "HTTP " + std::to_string(http_status);
  if (body.is_object()) {
    std::string name = body.value("code", "");
    for (int c = 0; c <= 16; ++c) {
      if (absl::StatusCodeToString(static_cast<absl::StatusCode>(c)) == name) {
        code = static_cast<absl::StatusCode>(c);
      }
    }
    message = body.value("message", message);
  }
  if (code == absl::StatusCode::kOk) code = absl::StatusCode::kUnknown;
  absl::Status out(code, message);
  if (body.is_object() && body.contains("retry_after") &&
      body["retry_after"].is_number()) {
    out = WithRetryAfter(std::move(out), std::chrono::seconds(
                                             body["retry_after"].get<int64_t>()));
  }
  return out;
}

int HttpStatusFor(absl::StatusCode code) {
  switch (code) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kOutOfRange:
      return 400;
    case absl::StatusCode::kUnauthenticated:
      return 401;
    case absl::StatusCode::kPermissionDenied:
      return 403;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kAlreadyExists:
    case absl::StatusCode::kAborted:
      return 409;
    case absl::StatusCode::kResourceExhausted:
      return 429;
    case absl::StatusCode::kUnavailable:
      return 503;
    default:
      return 500;
  }
}

json AuthorizationToJson(const UploadAuthorization& auth) {
  return {{"tan", auth.tan},
          {"kind", AuthorizationKindName(auth.kind)},
          {"issued_at", FormatIsoTimestamp(auth.issued_at)},
          {"expires_at", FormatIsoTimestamp(auth.issued_at + auth.validity)}};
}

absl::StatusOr<UploadAuthorization> AuthorizationFromJson(const json& body) {
  UploadAuthorization auth;
  ASSIGN_OR_RETURN(auth.tan, StringField(body, "tan"));
  ASSIGN_OR_RETURN(auto kind, StringField(body, "kind"));
  ASSIGN_OR_RETURN(auth.kind, ParseAuthorizationKind(kind));
  ASSIGN_OR_RETURN(auto issued, StringField(body, "issued_at"));
  ASSIGN_OR_RETURN(auth.issued_at, ParseIsoTimestamp(issued));
  ASSIGN_OR_RETURN(auto expires, StringField(body, "expires_at"));
  ASSIGN_OR_RETURN(UtcTime expires_at, ParseIsoTimestamp(expires));
  auth.validity = expires_at - auth.issued_at;
  return auth;
}

json ReportToJson(const ReportRequest& report) {
  json keys = json::array();
  for (const auto& k : report.keys) {
    keys.push_back({{"date", FormatIsoDate(k.date())}, {"key_hex", k.Hex()}});
  }
  json body = {{"tan", report.tan}, {"keys", keys}};
  if (!report.ce_tcns.empty()) body["ce_tcns"] = CeListToJson(report.ce_tcns);
  return body;
}

absl::StatusOr<ReportRequest> ReportFromJson(const json& body) {
  ReportRequest report;
  ASSIGN_OR_RETURN(report.tan, StringField(body, "tan"));
  bool has_keys = body.contains("keys") && body["keys"].is_array() &&
                  !body["keys"].empty();
  if (!has_keys) {
    if (body.contains("tcns") || body.contains("ce_tcns")) {
      return absl::InvalidArgumentError(
          "contact numbers cannot be uploaded without the daily keys that "
          "generate them");
    }
    return absl::InvalidArgumentError("report carries no daily keys");
  }
  for (const auto& item : body["keys"]) {
    ASSIGN_OR_RETURN(auto date_text, StringField(item, "date"));
    ASSIGN_OR_RETURN(auto key_hex, StringField(item, "key_hex"));
    ASSIGN_OR_RETURN(Date date, ParseIsoDate(date_text));
    ASSIGN_OR_RETURN(auto bytes, HexDecodeFixed<tcn::kDailyKeySize>(key_hex));
    report.keys.emplace_back(date, bytes);
    SecureWipe(bytes);
  }
  if (body.contains("tcns")) {
    return absl::InvalidArgumentError("raw TCN lists are not accepted");
  }
  if (body.contains("ce_tcns")) {
    ASSIGN_OR_RETURN(report.ce_tcns, CeListFromJson(body["ce_tcns"]));
  }
  return report;
}

json SummaryToJson(const BatchSummary& s) {
  json body = {{"batch_id", s.batch_id},
               {"sealed_at", FormatIsoTimestamp(s.sealed_at)},
               {"entry_count", s.entry_count}};
  if (!s.first_order_filter.empty() || !s.second_order_filter.empty()) {
    body["first_order_filter"] = HexEncode(s.first_order_filter);
    body["second_order_filter"] = HexEncode(s.second_order_filter);
  } else {
    body["first_order"] = CeListToJson(s.first_order);
    body["second_order"] = CeListToJson(s.second_order);
  }
  return body;
}

absl::StatusOr<BatchSummary> SummaryFromJson(const json& body) {
  BatchSummary s;
  ASSIGN_OR_RETURN(s.batch_id, UintField(body, "batch_id"));
  ASSIGN_OR_RETURN(auto sealed, StringField(body, "sealed_at"));
  ASSIGN_OR_RETURN(s.sealed_at, ParseIsoTimestamp(sealed));
  ASSIGN_OR_RETURN(s.entry_count, UintField(body, "entry_count"));
  if (body.contains("first_order_filter")) {
    ASSIGN_OR_RETURN(auto f1, StringField(body, "first_order_filter"));
    ASSIGN_OR_RETURN(auto f2, StringField(body, "second_order_filter"));
    ASSIGN_OR_RETURN(s.first_order_filter, HexDecode(f1));
    ASSIGN_OR_RETURN(s.second_order_filter, HexDecode(f2));
  } else {
    if (!body.contains("first_order") || !body.contains("second_order")) {
      return absl::InvalidArgumentError("batch summary has no payload");
    }
    ASSIGN_OR_RETURN(s.first_order, CeListFromJson(body["first_order"]));
    ASSIGN_OR_RETURN(s.second_order, CeListFromJson(body["second_order"]));
  }
  return s;
}

json GroupToJson(std::span<const psi::GroupElement> group) {
  json out = json::array();
  for (const auto& e : group) out.push_back(e.Hex());
  return out;
}

absl::StatusOr<std::vector<psi::GroupElement>> GroupFromJson(const json& body) {
  if (!body.is_array()) {
    return absl::InvalidArgumentError("expected a list of group elements");
  }
  std::vector<psi::GroupElement> out;
  out.reserve(body.size());
  for (const auto& item : body) {
    if (!item.is_string()) return absl::InvalidArgumentError("expected hex");
    ASSIGN_OR_RETURN(auto e, psi::GroupElement::FromHex(item.get<std::string>()));
    out.push_back(e);
  }
  return out;
}

json PsiReplyToJson(const PsiReply& reply) {
  json batches = json::array();
  for (size_t i = 0; i < reply.batch_ids.size(); ++i) {
    json groups = json::array();
    for (const auto& g : reply.per_batch[i]) groups.push_back(GroupToJson(g));
    batches.push_back({{"batch_id", reply.batch_ids[i]}, {"groups", groups}});
  }
  return {{"session_id", reply.session_id}, {"batches", batches}};
}

absl::StatusOr<PsiReply> PsiReplyFromJson(const json& body) {
  PsiReply reply;
  ASSIGN_OR_RETURN(reply.session_id, UintField(body, "session_id"));
  if (!body.contains("batches") || !body["batches"].is_array()) {
    return absl::InvalidArgumentError("PSI reply has no batches");
  }
  for (const auto& b : body["batches"]) {
    ASSIGN_OR_RETURN(uint64_t id, UintField(b, "batch_id"));
    if (!b.contains("groups") || !b["groups"].is_array()) {
      return absl::InvalidArgumentError("PSI reply batch has no groups");
    }
    psi::ElementGroups groups;
    for (const auto& g : b["groups"]) {
      ASSIGN_OR_RETURN(auto group, GroupFromJson(g));
      groups.push_back(std::move(group));
    }
    reply.batch_ids.push_back(id);
    reply.per_batch.push_back(std::move(groups));
  }
  return reply;
}

json ChallengeToJson(const ProofChallenge& c) {
  return {{"nonce", c.nonce_hex}, {"expires_at", FormatIsoTimestamp(c.expires_at)}};
}

absl::StatusOr<ProofChallenge> ChallengeFromJson(const json& body) {
  ProofChallenge c;
  ASSIGN_OR_RETURN(c.nonce_hex, StringField(body, "nonce"));
  ASSIGN_OR_RETURN(auto expires, StringField(body, "expires_at"));
  ASSIGN_OR_RETURN(c.expires_at, ParseIsoTimestamp(expires));
  return c;
}

}  // namespace ctrace::server::codec
