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

#include "lodbridge/common/http.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "lodbridge/common/error.hpp"

namespace lodbridge::http {

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

std::optional<Url> parse_url(std::string_view text) {
  const auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
  Url url;
  url.scheme = std::string(text.substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https") return std::nullopt;
  auto rest = text.substr(scheme_end + 3);
  const auto slash = rest.find_first_of("/?");
  auto authority = rest.substr(0, slash);
  url.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (!url.target.empty() && url.target.front() == '?') url.target = "/" + url.target;
  if (authority.empty()) return std::nullopt;
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    url.host = std::string(authority.substr(0, colon));
    try {
      url.port = std::stoi(std::string(authority.substr(colon + 1)));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  } else {
    url.host = std::string(authority);
    url.port = url.scheme == "https" ? 443 : 80;
  }
  if (url.host.empty()) return std::nullopt;
  return url;
}

bool is_absolute_url(std::string_view text) { return parse_url(text).has_value(); }

namespace {

template <typename Fn>
Response with_client(const std::string& url, std::chrono::milliseconds timeout, Fn&& fn) {
  const auto parsed = parse_url(url);
  if (!parsed) throw Error(Errc::invalid_argument, "not an absolute http URL: " + url);
  if (parsed->scheme != "http") {
    spdlog::warn("only plain http is supported, refusing {}", url);
    return {};
  }
  httplib::Client client(parsed->host, parsed->port);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Result result = fn(client, parsed->target);
  Response out;
  if (!result) return out;
  out.status = result->status;
  out.body = result->body;
  out.location = result->get_header_value("Location");
  return out;
}

}  // namespace

Response get(const std::string& url, std::chrono::milliseconds timeout) {
  return with_client(url, timeout,
                     [](httplib::Client& c, const std::string& target) { return c.Get(target); });
}

Response post(const std::string& url, const std::string& body, const std::string& content_type,
              std::chrono::milliseconds timeout) {
  return with_client(url, timeout, [&](httplib::Client& c, const std::string& target) {
    return c.Post(target, body, content_type);
  });
}

Response patch(const std::string& url, const std::string& body, std::chrono::milliseconds timeout) {
  return with_client(url, timeout, [&](httplib::Client& c, const std::string& target) {
    return c.Patch(target, body, "application/json");
  });
}

Response del(const std::string& url, std::chrono::milliseconds timeout) {
  return with_client(url, timeout,
                     [](httplib::Client& c, const std::string& target) { return c.Delete(target); });
}

Server::Server() : server_(std::make_unique<httplib::Server>()) {}

Server::~Server() { stop(); }

int Server::start(const std::string& host, int port) {
  host_ = host;
  if (port == 0) {
    port_ = server_->bind_to_any_port(host);
  } else {
    port_ = server_->bind_to_port(host, port) ? port : -1;
  }
  if (port_ < 0) throw Error(Errc::unavailable, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void Server::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

std::string Server::base_url() const {
  const std::string host = host_ == "0.0.0.0" ? "127.0.0.1" : host_;
  return "http://" + host + ":" + std::to_string(port_);
}

}  // namespace lodbridge::http
