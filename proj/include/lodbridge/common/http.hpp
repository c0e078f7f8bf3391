// Copyright 2026 The lodbridge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

namespace httplib {
class Server;
}

namespace lodbridge::http {

struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string target = "/";  // path plus query

  std::string origin() const;
};

std::optional<Url> parse_url(std::string_view text);
bool is_absolute_url(std::string_view text);

struct Response {
  int status = 0;  // 0 means the request never got an answer
  std::string body;
  std::string location;

  bool ok() const { return status >= 200 && status < 300; }
};

using namespace std::chrono_literals;

Response get(const std::string& url, std::chrono::milliseconds timeout = 5000ms);
Response post(const std::string& url, const std::string& body,
              const std::string& content_type = "application/json",
              std::chrono::milliseconds timeout = 5000ms);
Response patch(const std::string& url, const std::string& body,
               std::chrono::milliseconds timeout = 5000ms);
Response del(const std::string& url, std::chrono::milliseconds timeout = 5000ms);

/// An httplib server listening on a background thread.
class Server {
 public:
  Server();
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  httplib::Server& routes() { return *server_; }

  /// Port 0 binds an ephemeral port. Returns the bound port once the server
  /// accepts connections.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();

  int port() const { return port_; }
  std::string base_url() const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
};

}  // namespace lodbridge::http
