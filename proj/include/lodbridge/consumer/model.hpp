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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/historian/historian.hpp"

namespace lodbridge::consumer {

inline constexpr const char* kBikeStationType = "BikeHireDockingStation";
inline constexpr const char* kAvailableBikesAttr = "availableBikeNumber";

struct StationSnapshot {
  std::string station_id;
  std::int64_t available_bikes = 0;
  std::optional<double> temperature;
  std::optional<double> precipitation;
  std::optional<double> traffic_intensity;
  Timestamp as_of{};

  Json to_json() const;
};

/// Reads the station, the WeatherObserved entity of the station's locality
/// (any WeatherObserved when the station has no address) and the
/// TrafficFlowObserved closest to the station's location (lowest id when
/// locations are missing). Throws Error(not_found) for a missing station.
StationSnapshot collect_latest(broker::BrokerApi& broker, const std::string& station_id);

struct BaselineModel {
  std::map<std::pair<std::string, int>, double> table;  // (station, hour of week) -> mean
  std::map<std::pair<std::string, int>, std::size_t> cell_counts;
  std::map<std::string, double> station_means;
  double global_mean = 0;
  std::size_t trained_on = 0;
  Timestamp trained_at{};

  Json to_json() const;
};

/// Means of `attr` per (entity, hourOfWeek(observedAt)). Records of other
/// attributes are ignored. Throws Error(invalid_argument) when nothing is
/// left to train on and Error(malformed) for non-numeric or negative
/// values.
BaselineModel train_baseline(const std::vector<historian::HistoryRecord>& records, Timestamp trained_at,
                             const std::string& attr = kAvailableBikesAttr);

struct Prediction {
  std::string station;
  Timestamp at{};
  double value = 0;
  std::string confidence;

  Json to_json() const;
};

class Predictor {
 public:
  virtual ~Predictor() = default;
  /// Throws Error(unknown_station) for stations absent from training data.
  virtual Prediction predict(const std::string& station, Timestamp at) const = 0;
};

class BaselinePredictor final : public Predictor {
 public:
  explicit BaselinePredictor(BaselineModel model) : model_(std::move(model)) {}
  Prediction predict(const std::string& station, Timestamp at) const override;
  const BaselineModel& model() const { return model_; }

 private:
  BaselineModel model_;
};

Prediction predict(const BaselineModel& model, const std::string& station, Timestamp at);

}  // namespace lodbridge::consumer
