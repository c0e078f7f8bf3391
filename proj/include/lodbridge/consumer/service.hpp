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

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/consumer/model.hpp"

namespace lodbridge::consumer {

using TrainingSource = std::function<std::vector<historian::HistoryRecord>()>;

/// Pulls a jsonl export from a historian server.
TrainingSource historian_http_source(const std::string& historian_url);

struct RequestLogEntry {
  std::uint64_t seq = 0;
  std::string request;
  std::vector<std::string> steps;
  int status = 0;

  Json to_json() const;
};

/// GET  /predict?station=<id>&at=<iso8601>
/// POST /train
/// GET  /requests
class ConsumerService {
 public:
  ConsumerService(broker::BrokerApi& broker, TrainingSource source, std::shared_ptr<Clock> clock = system_clock());

  /// Returns the number of records trained on.
  std::size_t train();
  /// request -> collect_latest -> predict. Collection failures are logged
  /// and do not block the prediction.
  Prediction handle_predict(const std::string& station, Timestamp at);

  std::vector<RequestLogEntry> request_log() const;
  std::shared_ptr<const BaselinePredictor> predictor() const;

  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  std::string base_url() const { return server_.base_url(); }

 private:
  void install_routes();
  RequestLogEntry& open_entry(std::string request);

  broker::BrokerApi& broker_;
  std::mutex broker_mu_;
  TrainingSource source_;
  std::shared_ptr<Clock> clock_;

  mutable std::mutex model_mu_;
  std::shared_ptr<const BaselinePredictor> predictor_;

  mutable std::mutex log_mu_;
  std::vector<RequestLogEntry> log_;

  http::Server server_;
};

}  // namespace lodbridge::consumer
