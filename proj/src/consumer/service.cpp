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

#include "lodbridge/consumer/service.hpp"

#include <httplib.h>

#include "../common/http_util.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::consumer {

TrainingSource historian_http_source(const std::string& historian_url) {
  return [historian_url] {
    const auto res = http::get(historian_url + "/historian/export?format=jsonl", std::chrono::seconds(30));
    if (!res.ok()) throw Error(Errc::unavailable, "historian export answered " + std::to_string(res.status));
    std::vector<historian::HistoryRecord> out;
    for (const auto& line : text::split(res.body, '\n')) {
      if (!text::trim(line).empty()) out.push_back(historian::HistoryRecord::from_json(parse_json(line)));
    }
    return out;
  };
}

Json RequestLogEntry::to_json() const {
  return {{"seq", seq}, {"request", request}, {"steps", steps}, {"status", status}};
}

ConsumerService::ConsumerService(broker::BrokerApi& broker, TrainingSource source, std::shared_ptr<Clock> clock)
    : broker_(broker), source_(std::move(source)), clock_(std::move(clock)) {
  install_routes();
}

std::size_t ConsumerService::train() {
  auto model = train_baseline(source_(), clock_->now());
  const auto n = model.trained_on;
  auto next = std::make_shared<const BaselinePredictor>(std::move(model));
  std::lock_guard lock(model_mu_);
  predictor_ = std::move(next);
  return n;
}

std::shared_ptr<const BaselinePredictor> ConsumerService::predictor() const {
  std::lock_guard lock(model_mu_);
  return predictor_;
}

RequestLogEntry& ConsumerService::open_entry(std::string request) {
  log_.push_back(RequestLogEntry{log_.size() + 1, std::move(request), {}, 0});
  return log_.back();
}

Prediction ConsumerService::handle_predict(const std::string& station, Timestamp at) {
  std::vector<std::string> steps{"request"};
  int status = 200;
  auto finish = [&] {
    std::lock_guard lock(log_mu_);
    auto& entry = open_entry("predict station=" + station + " at=" + format_utc(at));
    entry.steps = steps;
    entry.status = status;
  };
  try {
    try {
      std::lock_guard lock(broker_mu_);
      const auto snap = collect_latest(broker_, station);
      steps.push_back("collect_latest availableBikes=" + std::to_string(snap.available_bikes));
    } catch (const Error& e) {
      steps.push_back(std::string("collect_latest failed: ") + e.what());
    }
    const auto model = predictor();
    if (!model) throw Error(Errc::unavailable, "model not trained");
    auto p = model->predict(station, at);
    steps.push_back("predict " + dump_compact(Json(p.value)));
    steps.push_back("response");
    finish();
    return p;
  } catch (const Error& e) {
    status = http::status_for(e.code());
    steps.push_back(std::string("error: ") + e.what());
    finish();
    throw;
  }
}

std::vector<RequestLogEntry> ConsumerService::request_log() const {
  std::lock_guard lock(log_mu_);
  return log_;
}

void ConsumerService::install_routes() {
  auto& routes = server_.routes();
  routes.Get("/predict", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      if (!req.has_param("station") || !req.has_param("at")) {
        throw Error(Errc::invalid_argument, "station and at are required");
      }
      const auto p = handle_predict(req.get_param_value("station"), parse_timestamp(req.get_param_value("at")));
      http::send_json(res, 200, p.to_json());
    } catch (const Error& e) {
      http::send_json(res, http::status_for(e.code()), Json{{"error", e.what()}});
    }
  });
  routes.Post("/train", [this](const httplib::Request&, httplib::Response& res) {
    try {
      const auto n = train();
      http::send_json(res, 200, Json{{"trainedOn", n}, {"trainedAt", format_utc(predictor()->model().trained_at)}});
    } catch (const Error& e) {
      http::send_json(res, http::status_for(e.code()), Json{{"error", e.what()}});
    }
  });
  routes.Get("/requests", [this](const httplib::Request&, httplib::Response& res) {
    Json out = Json::array();
    for (const auto& entry : request_log()) out.push_back(entry.to_json());
    http::send_json(res, 200, out);
  });
}

int ConsumerService::start(const std::string& host, int port) { return server_.start(host, port); }

void ConsumerService::stop() { server_.stop(); }

}  // namespace lodbridge::consumer
