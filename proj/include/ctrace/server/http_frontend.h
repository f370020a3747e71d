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
#ifndef CTRACE_SERVER_HTTP_FRONTEND_H_
#define CTRACE_SERVER_HTTP_FRONTEND_H_

#include <memory>
#include <string>
#include <thread>

#include "absl/status/statusor.h"
#include "ctrace/common/time.h"
#include "ctrace/server/tracing_server.h"

namespace httplib {
class Server;
}

namespace ctrace::server {

// HTTP/1.1 + JSON binding of TracingServer under /v1. The server never
// records client addresses.
class HttpFrontend {
 public:
  HttpFrontend(TracingServer& server, Clock clock);
  ~HttpFrontend();

  HttpFrontend(const HttpFrontend&) = delete;
  HttpFrontend& operator=(const HttpFrontend&) = delete;

  // Binds (port 0 picks a free one) and serves from a background thread.
  // Returns the bound port.
  absl::StatusOr<int> Start(const std::string& host, int port);
  // Binds and serves on the calling thread until Stop().
  absl::Status Serve(const std::string& host, int port);
  void Stop();

 private:
  void RegisterRoutes();

  TracingServer& server_;
  Clock clock_;
  std::unique_ptr<httplib::Server> http_;
  std::thread thread_;
};

}  // namespace ctrace::server

#endif  // CTRACE_SERVER_HTTP_FRONTEND_H_
