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

#include "lodbridge/consumer/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lodbridge/common/error.hpp"

namespace lodbridge::consumer {

namespace {

std::optional<double> number_attr(const entity::Entity& e, std::string_view name) {
  const auto* a = e.find(name);
  if (a == nullptr || !a->value.is_number()) return std::nullopt;
  return a->value.get<double>();
}

std::optional<std::string> locality(const entity::Entity& e) {
  const auto* a = e.find("address");
  if (a == nullptr || !a->value.is_object()) return std::nullopt;
  const auto it = a->value.find("addressLocality");
  if (it == a->value.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

std::optional<std::pair<double, double>> point(const entity::Entity& e) {
  const auto* a = e.find("location");
  if (a == nullptr || !a->value.is_object() || a->value.value("type", "") != "Point") return std::nullopt;
  const auto& c = a->value.at("coordinates");
  if (!c.is_array() || c.size() < 2 || !c[0].is_number() || !c[1].is_number()) return std::nullopt;
  return std::make_pair(c[0].get<double>(), c[1].get<double>());
}

/// Equirectangular distance; fine for ranking nearby points.
double distance(std::pair<double, double> a, std::pair<double, double> b) {
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  const double x = (b.first - a.first) * std::cos((a.second + b.second) / 2 * kDeg);
  const double y = b.second - a.second;
  return std::sqrt(x * x + y * y);
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json StationSnapshot::to_json() const {
  return {{"stationId", station_id},
          {"availableBikes", available_bikes},
          {"temperature", optional_number(temperature)},
          {"precipitation", optional_number(precipitation)},
          {"trafficIntensity", optional_number(traffic_intensity)},
          {"asOf", format_utc(as_of)}};
}

StationSnapshot collect_latest(broker::BrokerApi& broker, const std::string& station_id) {
  const auto station = broker.get(entity::EntityId(station_id));
  if (!station) throw Error(Errc::not_found, "station '" + station_id + "' not found");

  StationSnapshot snap;
  snap.station_id = station_id;
  const auto* bikes = station->find(kAvailableBikesAttr);
  if (bikes == nullptr || !bikes->value.is_number()) {
    throw Error(Errc::malformed, "station '" + station_id + "' has no numeric " + kAvailableBikesAttr);
  }
  snap.available_bikes = std::max<std::int64_t>(0, std::llround(bikes->value.get<double>()));
  if (bikes->observed_at) {
    snap.as_of = *bikes->observed_at;
  } else if (const auto* date = station->find("dateObserved"); date && date->value.is_string()) {
    if (auto t = parse_iso8601(date->value.get<std::string>())) snap.as_of = *t;
  }

  broker::EntityQuery weather_query;
  weather_query.type = "WeatherObserved";
  const auto weather = broker.query(weather_query);
  const auto city = locality(*station);
  const entity::Entity* chosen = nullptr;
  for (const auto& w : weather) {
    if (!city || locality(w) == city) {
      chosen = &w;
      break;
    }
  }
  if (chosen != nullptr) {
    snap.temperature = number_attr(*chosen, "temperature");
    snap.precipitation = number_attr(*chosen, "precipitation");
  }

  broker::EntityQuery traffic_query;
  traffic_query.type = "TrafficFlowObserved";
  auto traffic = broker.query(traffic_query);
  std::sort(traffic.begin(), traffic.end(), [](const auto& a, const auto& b) { return a.id() < b.id(); });
  const auto here = point(*station);
  const entity::Entity* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : traffic) {
    const auto there = point(t);
    const double d = (here && there) ? distance(*here, *there) : std::numeric_limits<double>::max();
    if (nearest == nullptr || d < best) {
      nearest = &t;
      best = d;
    }
  }
  if (nearest != nullptr) snap.traffic_intensity = number_attr(*nearest, "intensity");
  return snap;
}

Json BaselineModel::to_json() const {
  Json cells = Json::array();
  for (const auto& [key, mean] : table) {
    cells.push_back({{"station", key.first}, {"hourOfWeek", key.second}, {"mean", mean},
                     {"count", cell_counts.at(key)}});
  }
  return {{"trainedOn", trained_on}, {"trainedAt", format_utc(trained_at)}, {"globalMean", global_mean},
          {"cells", cells}};
}

BaselineModel train_baseline(const std::vector<historian::HistoryRecord>& records, Timestamp trained_at,
                             const std::string& attr) {
  std::map<std::pair<std::string, int>, double> sums;
  std::map<std::string, std::pair<double, std::size_t>> station_sums;
  BaselineModel m;
  double total = 0;
  for (const auto& r : records) {
    if (r.attr_name != attr) continue;
    if (!r.value.is_number()) throw Error(Errc::malformed, "non-numeric " + attr + " in record " + std::to_string(r.seq));
    const double v = r.value.get<double>();
    if (v < 0) throw Error(Errc::malformed, "negative " + attr + " in record " + std::to_string(r.seq));
    const auto key = std::make_pair(r.entity_id, hour_of_week(r.observed_at));
    sums[key] += v;
    ++m.cell_counts[key];
    auto& s = station_sums[r.entity_id];
    s.first += v;
    ++s.second;
    total += v;
    ++m.trained_on;
  }
  if (m.trained_on == 0) throw Error(Errc::invalid_argument, "no " + attr + " records to train on");
  for (const auto& [key, sum] : sums) m.table[key] = sum / static_cast<double>(m.cell_counts[key]);
  for (const auto& [station, s] : station_sums) m.station_means[station] = s.first / static_cast<double>(s.second);
  m.global_mean = total / static_cast<double>(m.trained_on);
  m.trained_at = trained_at;
  return m;
}

Json Prediction::to_json() const {
  return {{"station", station}, {"at", format_utc(at)}, {"predictedAvailableBikes", value}, {"confidence", confidence}};
}

Prediction predict(const BaselineModel& model, const std::string& station, Timestamp at) {
  const int how = hour_of_week(at);
  Prediction p{station, at, 0, {}};
  if (auto it = model.table.find({station, how}); it != model.table.end()) {
    p.value = it->second;
    p.confidence = "hour-of-week mean over " + std::to_string(model.cell_counts.at({station, how})) + " observations";
    return p;
  }
  if (auto it = model.station_means.find(station); it != model.station_means.end()) {
    p.value = it->second;
    p.confidence = "station-wide mean; no observations for hour-of-week " + std::to_string(how);
    return p;
  }
  throw Error(Errc::unknown_station, "station '" + station + "' is not in the model");
}

Prediction BaselinePredictor::predict(const std::string& station, Timestamp at) const {
  return consumer::predict(model_, station, at);
}

}  // namespace lodbridge::consumer
