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

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "../common/http_util.hpp"
#include "internal.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/dataflow/catalog_publisher.hpp"

namespace lodbridge::dataflow::detail {

namespace {

using Steady = std::chrono::steady_clock;

class HttpPollProcessor final : public Processor {
 public:
  explicit HttpPollProcessor(const Json& params) : url_(require_string(params, "url")) {
    if (!http::is_absolute_url(url_)) throw Error(Errc::validation, "url must be absolute");
    if (!params.contains("intervalSeconds") || !params.at("intervalSeconds").is_number()) {
      throw Error(Errc::validation, "missing numeric param 'intervalSeconds'");
    }
    const double interval = params.at("intervalSeconds").get<double>();
    if (interval <= 0) throw Error(Errc::validation, "intervalSeconds must be positive");
    interval_ = std::chrono::duration_cast<Steady::duration>(std::chrono::duration<double>(interval));
    if (params.contains("maxPolls")) {
      const auto n = params.at("maxPolls").get<long long>();
      if (n < 1) throw Error(Errc::validation, "maxPolls must be >= 1");
      max_polls_ = static_cast<std::uint64_t>(n);
    }
    timeout_ = std::chrono::milliseconds(static_cast<long long>(params.value("timeoutSeconds", 5.0) * 1000));
  }

  bool is_source() const override { return true; }

  void run(ProcessorContext& ctx) override {
    const auto start = Steady::now();
    for (std::uint64_t k = 0; !max_polls_ || k < *max_polls_; ++k) {
      const auto deadline = start + interval_ * static_cast<long>(k);
      if (ctx.wait_stop_for(deadline - Steady::now()) || ctx.stopping()) return;
      poll_once(ctx);
    }
  }

 private:
  void poll_once(ProcessorContext& ctx) {
    const auto res = http::get(url_, timeout_);
    if (!res.ok()) {
      spdlog::warn("{}: GET {} answered {}; retrying next interval", ctx.name(), url_, res.status);
      return;
    }
    auto record = ctx.make_record(res.body, {{"content-type", "application/json"},
                                             {"source.url", url_},
                                             {"fetch.time", format_utc(ctx.services().clock->now())},
                                             {"http.status", std::to_string(res.status)}});
    ctx.emit(std::move(record));
  }

  std::string url_;
  Steady::duration interval_{};
  std::optional<std::uint64_t> max_polls_;
  std::chrono::milliseconds timeout_{5000};
};

/// `POST /ingest/{sourceId}` -> 202. With splitNotification, a broker
/// notification body yields one record per entity in `data`.
class HttpListenProcessor final : public Processor {
 public:
  explicit HttpListenProcessor(const Json& params)
      : host_(params.value("host", "127.0.0.1")),
        port_(params.value("port", 0)),
        split_(params.value("splitNotification", false)) {
    if (params.contains("sourceId")) source_id_ = require_string(params, "sourceId");
  }

  bool is_source() const override { return true; }

  void open(ProcessorContext& ctx) override {
    ctx_ = &ctx;
    server_.routes().Post("/ingest/([^/]+)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto source = text::url_decode(req.matches[1].str());
      if (source_id_ && source != *source_id_) {
        http::send_json(res, 404, Json{{"error", "unknown source '" + source + "'"}});
        return;
      }
      if (ctx_->stopping()) {
        http::send_json(res, 503, Json{{"error", "stopping"}});
        return;
      }
      std::vector<std::string> payloads;
      if (split_) {
        try {
          for (const auto& doc : entity_documents(parse_json(req.body))) payloads.push_back(dump_compact(doc));
        } catch (const Error& e) {
          http::send_json(res, 400, Json{{"error", e.what()}});
          return;
        }
      } else {
        payloads.push_back(req.body);
      }
      const auto received = format_utc(ctx_->services().clock->now());
      for (auto& payload : payloads) {
        auto record = ctx_->make_record(std::move(payload), {{"content-type", req.get_header_value("Content-Type")},
                                                             {"source.id", source},
                                                             {"received.time", received}});
        ctx_->emit(std::move(record));
      }
      http::send_json(res, 202, Json{{"accepted", payloads.size()}});
    });
    server_.start(host_, port_);
  }

  void run(ProcessorContext& ctx) override {
    while (!ctx.wait_stop_for(std::chrono::hours(1))) {
    }
  }

  void close() override { server_.stop(); }

  std::string endpoint() const override { return server_.base_url(); }

 private:
  std::string host_;
  int port_;
  bool split_;
  std::optional<std::string> source_id_;
  ProcessorContext* ctx_ = nullptr;
  http::Server server_;
};

}  // namespace

std::unique_ptr<Processor> make_http_poll(const Json& params) { return std::make_unique<HttpPollProcessor>(params); }

std::unique_ptr<Processor> make_http_listen(const Json& params) {
  return std::make_unique<HttpListenProcessor>(params);
}

}  // namespace lodbridge::dataflow::detail
