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

#include "lodbridge/dataflow/device_gateway.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <mutex>
#include <thread>

#include "../common/http_util.hpp"
#include "internal.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/entity/representation.hpp"

namespace lodbridge::dataflow {

DeviceRegistry::DeviceRegistry(std::vector<DeviceEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.device_id.empty() || e.entity_type.empty()) throw Error(Errc::validation, "device entry incomplete");
    if (!entity::EntityId::is_valid(e.entity_id)) {
      throw Error(Errc::validation, "device '" + e.device_id + "': entityId must be a URN");
    }
    if (e.attributes.empty()) throw Error(Errc::validation, "device '" + e.device_id + "' maps no attributes");
    for (std::size_t j = 0; j < i; ++j) {
      if (entries_[j].device_id == e.device_id) {
        throw Error(Errc::validation, "device '" + e.device_id + "' registered twice");
      }
    }
  }
}

const DeviceEntry* DeviceRegistry::find(const std::string& device_id) const {
  for (const auto& e : entries_) {
    if (e.device_id == device_id) return &e;
  }
  return nullptr;
}

DeviceRegistry DeviceRegistry::from_json(const Json& doc) {
  std::vector<DeviceEntry> entries;
  try {
    for (const auto& d : doc.at("devices")) {
      DeviceEntry e;
      e.device_id = d.at("deviceId").get<std::string>();
      e.entity_type = d.at("entityType").get<std::string>();
      e.entity_id = d.at("entityId").get<std::string>();
      for (const auto& [key, attr] : d.at("attributes").items()) e.attributes[key] = attr.get<std::string>();
      if (d.contains("timestampKey")) e.timestamp_key = d.at("timestampKey").get<std::string>();
      entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad device registry: ") + e.what());
  }
  return DeviceRegistry(std::move(entries));
}

DeviceRegistry DeviceRegistry::load(const std::string& path) { return from_json(read_json_file(path)); }

entity::Entity ingest_device_measure(const Json& measure, const DeviceEntry& entry, const Clock& clock) {
  if (!measure.is_object()) throw Error(Errc::malformed, "measure must be a JSON object");
  Timestamp observed = clock.now();
  if (entry.timestamp_key && measure.contains(*entry.timestamp_key)) {
    const auto& raw = measure.at(*entry.timestamp_key);
    if (!raw.is_string()) throw Error(Errc::malformed, "measure timestamp must be a string");
    auto t = parse_iso8601(raw.get<std::string>());
    if (!t) throw Error(Errc::malformed, "measure timestamp '" + raw.get<std::string>() + "' is not ISO 8601");
    observed = *t;
  }
  entity::Entity e(entity::EntityId(entry.entity_id), entry.entity_type);
  for (const auto& [key, attr_name] : entry.attributes) {
    if (!measure.contains(key)) continue;
    auto attr = entity::Attribute::property(attr_name, normalize_numbers(measure.at(key)));
    attr.observed_at = observed;
    e.set(std::move(attr));
  }
  if (e.attributes().empty()) {
    throw Error(Errc::malformed, "measure for '" + entry.device_id + "' carries no mapped attribute");
  }
  if (!e.find("dateObserved")) {
    auto date = entity::Attribute::property("dateObserved", format_utc(observed));
    date.observed_at = observed;
    e.set(std::move(date));
  }
  return e;
}

entity::Entity ingest_device_measure(const Json& measure, const DeviceRegistry& registry, const Clock& clock,
                                     std::optional<std::string> device_id) {
  if (!measure.is_object()) throw Error(Errc::malformed, "measure must be a JSON object");
  if (!device_id) {
    if (!measure.contains("dev") || !measure.at("dev").is_string()) {
      throw Error(Errc::malformed, "measure names no device ('dev')");
    }
    device_id = measure.at("dev").get<std::string>();
  }
  const auto* entry = registry.find(*device_id);
  if (entry == nullptr) throw Error(Errc::unknown_device, "device '" + *device_id + "' is not registered");
  return ingest_device_measure(measure, *entry, clock);
}

// ---- processor ------------------------------------------------------------

namespace detail {
namespace {

/// HTTP `POST /devices/{id}/measures`, plus optional TCP lines of the form
/// `devices/<id>/measures <json>` answered with `OK` or `ERR <reason>`.
class DeviceGatewayProcessor final : public Processor {
 public:
  DeviceGatewayProcessor(const Json& params, const std::filesystem::path& base_dir)
      : registry_(DeviceRegistry::load(resolve(base_dir, require_string(params, "registry")).string())),
        host_(params.value("host", "127.0.0.1")),
        port_(params.value("port", 0)),
        tcp_requested_(params.contains("tcpPort")),
        tcp_port_(params.value("tcpPort", 0)) {}

  bool is_source() const override { return true; }

  void open(ProcessorContext& ctx) override {
    ctx_ = &ctx;
    server_.routes().Post("/devices/([^/]+)/measures", [this](const httplib::Request& req, httplib::Response& res) {
      auto [status, message] = accept(text::url_decode(req.matches[1].str()), req.body);
      http::send_json(res, status, status == 202 ? Json{{"accepted", true}} : Json{{"error", message}});
    });
    server_.start(host_, port_);
    if (tcp_requested_) open_tcp();
  }

  void run(ProcessorContext& ctx) override {
    while (!ctx.wait_stop_for(std::chrono::hours(1))) {
    }
  }

  void close() override {
    server_.stop();
    tcp_stop_ = true;
    if (tcp_thread_.joinable()) tcp_thread_.join();
    std::lock_guard lock(conn_mu_);
    for (auto& t : conn_threads_) {
      if (t.joinable()) t.join();
    }
    conn_threads_.clear();
  }

  std::string endpoint() const override { return server_.base_url(); }
  int tcp_port() const override { return bound_tcp_port_; }

 private:
  std::pair<int, std::string> accept(const std::string& device_id, const std::string& body) {
    try {
      const auto measure = parse_json(body);
      const auto entity = ingest_device_measure(measure, registry_, *ctx_->services().clock, device_id);
      auto record = ctx_->make_record(dump_compact(entity::to_normalized(entity)),
                                      {{"content-type", "application/json"},
                                       {"device.id", device_id},
                                       {"ngsi.entityId", entity.id().str()},
                                       {"ngsi.entityType", entity.type()}});
      ctx_->emit(std::move(record));
      return {202, {}};
    } catch (const Error& e) {
      spdlog::info("device-gateway {}: {}", ctx_->name(), e.what());
      return {http::status_for(e.code()), e.what()};
    }
  }

  void open_tcp() {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw Error(Errc::io, "socket() failed");
    int one = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(tcp_port_));
    if (::inet_pton(AF_INET, host_.c_str(), &addr.sin_addr) != 1) addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(listen_fd_, 16) != 0) {
      ::close(listen_fd_);
      throw Error(Errc::io, "cannot listen on tcp port " + std::to_string(tcp_port_));
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    bound_tcp_port_ = ntohs(addr.sin_port);
    tcp_thread_ = std::thread([this] { accept_loop(); });
  }

  void accept_loop() {
    while (!tcp_stop_) {
      pollfd pfd{listen_fd_, POLLIN, 0};
      if (::poll(&pfd, 1, 100) <= 0) continue;
      const int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) continue;
      std::lock_guard lock(conn_mu_);
      conn_threads_.emplace_back([this, fd] { serve_connection(fd); });
    }
    ::close(listen_fd_);
  }

  void serve_connection(int fd) {
    std::string buffer;
    char chunk[4096];
    while (!tcp_stop_) {
      pollfd pfd{fd, POLLIN, 0};
      if (::poll(&pfd, 1, 100) <= 0) continue;
      const auto n = ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) break;
      buffer.append(chunk, static_cast<std::size_t>(n));
      for (auto nl = buffer.find('\n'); nl != std::string::npos; nl = buffer.find('\n')) {
        const std::string line = buffer.substr(0, nl);
        const auto reply = handle_line(std::string(text::trim(line))) + "\n";
        buffer.erase(0, nl + 1);
        ::send(fd, reply.data(), reply.size(), MSG_NOSIGNAL);
      }
    }
    ::close(fd);
  }

  std::string handle_line(const std::string& line) {
    if (line.empty()) return "ERR empty line";
    const auto space = line.find(' ');
    const auto topic = line.substr(0, space);
    const auto parts = text::split(topic, '/');
    if (space == std::string::npos || parts.size() != 3 || parts[0] != "devices" || parts[2] != "measures") {
      return "ERR expected 'devices/<id>/measures <json>'";
    }
    auto [status, message] = accept(parts[1], line.substr(space + 1));
    return status == 202 ? "OK" : "ERR " + message;
  }

  DeviceRegistry registry_;
  std::string host_;
  int port_;
  bool tcp_requested_;
  int tcp_port_;
  ProcessorContext* ctx_ = nullptr;
  http::Server server_;

  int listen_fd_ = -1;
  int bound_tcp_port_ = 0;
  std::atomic<bool> tcp_stop_{false};
  std::thread tcp_thread_;
  std::mutex conn_mu_;
  std::vector<std::thread> conn_threads_;
};

}  // namespace

std::unique_ptr<Processor> make_device_gateway(const Json& params, const std::filesystem::path& base_dir) {
  return std::make_unique<DeviceGatewayProcessor>(params, base_dir);
}

}  // namespace detail
}  // namespace lodbridge::dataflow
