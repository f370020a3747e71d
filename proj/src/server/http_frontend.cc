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
#include "ctrace/server/http_frontend.h"

#include "ctrace/common/status_macros.h"
#include "ctrace/common/text.h"
#include "ctrace/server/json_codec.h"
#include "httplib.h"

namespace ctrace::server {
namespace {

using codec::json;

constexpr size_t kMaxBody = 64 << 20;

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, const absl::Status& status) {
  Reply(res, codec::HttpStatusFor(status.code()), codec::StatusToJson(status));
  if (auto retry = RetryAfterOf(status)) {
    res.set_header("Retry-After", std::to_string((retry->count() + 999) / 1000));
  }
}

absl::StatusOr<json> ParseBody(const httplib::Request& req) {
  auto body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    return absl::InvalidArgumentError("request body must be a JSON object");
  }
  return body;
}

std::string BearerToken(const httplib::Request& req) {
  std::string auth = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (auth.rfind(kPrefix, 0) != 0) return "";
  return auth.substr(kPrefix.size());
}

// Runs fn, turning a non-OK status into the JSON error shape.
template <typename Fn>
void Handle(httplib::Response& res, Fn&& fn) {
  absl::StatusOr<json> result = fn();
  if (result.ok()) {
    Reply(res, 200, *result);
  } else {
    ReplyError(res, result.status());
  }
}

absl::StatusOr<std::vector<uint64_t>> BatchIdsFrom(const json& body) {
  std::vector<uint64_t> ids;
  if (body.contains("batch_ids") && body["batch_ids"].is_array()) {
    for (const auto& v : body["batch_ids"]) {
      if (!v.is_number_unsigned()) {
        return absl::InvalidArgumentError("batch_ids must be integers");
      }
      ids.push_back(v.get<uint64_t>());
    }
  } else if (body.contains("batch_id") && body["batch_id"].is_number_unsigned()) {
    ids.push_back(body["batch_id"].get<uint64_t>());
  } else {
    return absl::InvalidArgumentError("batch_id or batch_ids is required");
  }
  return ids;
}

}  // namespace

HttpFrontend::HttpFrontend(TracingServer& server, Clock clock)
    : server_(server),
      clock_(std::move(clock)),
      http_(std::make_unique<httplib::Server>()) {
  http_->set_payload_max_length(kMaxBody);
  RegisterRoutes();
}

HttpFrontend::~HttpFrontend() { Stop(); }

void HttpFrontend::RegisterRoutes() {
  http_->Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    Reply(res, 200,
          {{"status", "ok"},
           {"open_batch", server_.open_batch_id()},
           {"sealed_batches", server_.BatchIds().size()}});
  });

  http_->Post("/v1/tan", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      AuthorizationKind kind = AuthorizationKind::kMedical;
      if (!req.body.empty()) {
        ASSIGN_OR_RETURN(json body, ParseBody(req));
        ASSIGN_OR_RETURN(kind, ParseAuthorizationKind(body.value("kind", "MEDICAL")));
      }
      ASSIGN_OR_RETURN(auto auth, server_.IssueTan(kind, BearerToken(req), clock_()));
      return codec::AuthorizationToJson(auth);
    });
  });

  http_->Post("/v1/report", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      ASSIGN_OR_RETURN(json body, ParseBody(req));
      ASSIGN_OR_RETURN(auto report, codec::ReportFromJson(body));
      ASSIGN_OR_RETURN(size_t n, server_.AcceptReport(report, clock_()));
      return json{{"accepted_ce_tcns", n}};
    });
  });

  http_->Get("/v1/batches", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      uint64_t since = 0;
      if (req.has_param("since") && !ParseNumber(req.get_param_value("since"), &since)) {
        return absl::InvalidArgumentError("since must be a batch id");
      }
      std::string mode = req.has_param("mode") ? req.get_param_value("mode") : "direct";
      if (mode != "direct" && mode != "psi") {
        return absl::InvalidArgumentError("mode must be direct or psi");
      }
      json batches = json::array();
      for (const auto& s : server_.ReleaseBatches(
               since, mode == "psi" ? ReleaseMode::kPsi : ReleaseMode::kDirect)) {
        batches.push_back(codec::SummaryToJson(s));
      }
      return json{{"mode", mode}, {"batches", batches}};
    });
  });

  http_->Post("/v1/psi/round1", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      ASSIGN_OR_RETURN(json body, ParseBody(req));
      std::string token = body.value("client_token", "");
      ASSIGN_OR_RETURN(auto ids, BatchIdsFrom(body));
      if (!body.contains("elements")) {
        return absl::InvalidArgumentError("elements is required");
      }
      ASSIGN_OR_RETURN(auto elements, codec::GroupFromJson(body["elements"]));
      psi::ElementGroups groups = {std::move(elements)};
      ASSIGN_OR_RETURN(auto reply, server_.PsiRound1(token, ids, groups, clock_()));
      return codec::PsiReplyToJson(reply);
    });
  });

  http_->Post("/v1/psi/refine", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      ASSIGN_OR_RETURN(json body, ParseBody(req));
      if (!body.contains("session_id") || !body["session_id"].is_number_unsigned() ||
          !body.contains("groups") || !body["groups"].is_array()) {
        return absl::InvalidArgumentError("session_id and groups are required");
      }
      psi::ElementGroups groups;
      for (const auto& g : body["groups"]) {
        ASSIGN_OR_RETURN(auto group, codec::GroupFromJson(g));
        groups.push_back(std::move(group));
      }
      ASSIGN_OR_RETURN(auto reply, server_.PsiRefine(body["session_id"].get<uint64_t>(),
                                                     groups, clock_()));
      return codec::PsiReplyToJson(reply);
    });
  });

  http_->Post("/v1/proof/challenge", [this](const httplib::Request&, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      return codec::ChallengeToJson(server_.IssueProofChallenge(clock_()));
    });
  });

  http_->Post("/v1/proof/response", [this](const httplib::Request& req, httplib::Response& res) {
    Handle(res, [&]() -> absl::StatusOr<json> {
      ASSIGN_OR_RETURN(json body, ParseBody(req));
      std::string nonce = body.value("nonce", "");
      if (!body.contains("responses") || !body["responses"].is_array()) {
        return absl::InvalidArgumentError("responses is required");
      }
      std::vector<ProofResponse> responses;
      for (const auto& r : body["responses"]) {
        if (!r.is_string()) return absl::InvalidArgumentError("responses are hex");
        ASSIGN_OR_RETURN(auto bytes, HexDecodeFixed<32>(r.get<std::string>()));
        responses.push_back(bytes);
      }
      ASSIGN_OR_RETURN(auto auth, server_.VerifyContactProof(nonce, responses, clock_()));
      return codec::AuthorizationToJson(auth);
    });
  });
}

absl::StatusOr<int> HttpFrontend::Start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = http_->bind_to_any_port(host);
    if (bound < 0) return absl::UnavailableError("cannot bind " + host);
  } else if (!http_->bind_to_port(host, port)) {
    return absl::UnavailableError("cannot bind " + host + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { http_->listen_after_bind(); });
  http_->wait_until_ready();
  return bound;
}

absl::Status HttpFrontend::Serve(const std::string& host, int port) {
  if (!http_->listen(host, port)) {
    return absl::UnavailableError("cannot serve on " + host + ":" + std::to_string(port));
  }
  return absl::OkStatus();
}

void HttpFrontend::Stop() {
  if (http_) http_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace ctrace::server
