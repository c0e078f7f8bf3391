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

#include "lodbridge/historian/server.hpp"

#include <spdlog/spdlog.h>

#include "../common/http_util.hpp"

namespace lodbridge::historian {

namespace {

Timestamp param_time(const httplib::Request& req, const char* key, Timestamp fallback) {
  if (!req.has_param(key)) return fallback;
  return parse_timestamp(req.get_param_value(key));
}

void send_error(httplib::Response& res, const Error& e) {
  http::send_json(res, http::status_for(e.code()), Json{{"error", std::string(to_string(e.code()))}, {"detail", e.what()}});
}

}  // namespace

HistorianServer::HistorianServer(Historian& historian) : historian_(historian) {
  auto& r = server_.routes();
  r.Post("/historian/notify", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto appended = historian_.on_notification(parse_json(req.body));
      http::send_json(res, 200, Json{{"appended", appended.size()}});
    } catch (const Error& e) {
      spdlog::warn("historian: rejected notification: {}", e.what());
      send_error(res, e);
    }
  });
  r.Get("/historian/query", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const auto rows = historian_.query(req.get_param_value("entity"), req.get_param_value("attr"),
                                         param_time(req, "from", Timestamp{}),
                                         param_time(req, "to", Timestamp::max()));
      Json out = Json::array();
      for (const auto& row : rows) out.push_back(row.to_json());
      http::send_json(res, 200, out);
    } catch (const Error& e) {
      send_error(res, e);
    }
  });
  r.Get("/historian/export", [this](const httplib::Request& req, httplib::Response& res) {
    const bool csv = req.get_param_value("format") != "jsonl";
    res.set_content(render(historian_.records(), csv ? ExportFormat::csv : ExportFormat::jsonl),
                    csv ? "text/csv" : "application/x-ndjson");
  });
}

int HistorianServer::start(const std::string& host, int port) { return server_.start(host, port); }

void HistorianServer::stop() { server_.stop(); }

}  // namespace lodbridge::historian
