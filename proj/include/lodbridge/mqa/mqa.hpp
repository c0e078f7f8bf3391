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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::mqa {

enum class Dimension { findability, accessibility, interoperability, reusability, contextuality };
std::string_view to_string(Dimension d);
Dimension dimension_from_string(std::string_view s);

enum class CheckKind {
  property_present,
  property_in_vocabulary,
  url_status,
  format_machine_readable,
  dcat_ap_conformance,
};
std::string_view to_string(CheckKind k);
CheckKind check_kind_from_string(std::string_view s);

/// Where a property is looked up relative to the scored dataset.
enum class Level { dataset, distribution, any };

struct Indicator {
  std::string id;
  Dimension dimension = Dimension::findability;
  int weight = 0;
  CheckKind check = CheckKind::property_present;
  // property IRIs (expanded); url-status uses the first as the primary
  // property and `fallback` when no value of it exists
  std::vector<std::string> properties;
  Level level = Level::dataset;
  std::optional<std::string> fallback;
  // property-in-vocabulary: a named vocabulary from Vocabularies
  std::string vocabulary;
  // dcat-ap-conformance: Turtle shapes file; empty = bundled shapes
  std::string shapes;
};

struct RatingThresholds {
  int excellent_min = 351;
  int good_min = 221;
  int sufficient_min = 121;

  void check() const;
};

/// Controlled lists. Labels are upper-case format names (CSV, JSON, ...).
struct Vocabularies {
  std::set<std::string> file_types;
  std::set<std::string> machine_readable;
  std::set<std::string> non_proprietary;
  std::map<std::string, std::string> media_subtypes;  // "rdf+xml" -> "RDF"
  std::vector<std::string> format_namespaces;         // IRIs counted as vocabulary-controlled
  std::vector<std::string> licence_namespaces;
  std::vector<std::string> access_right_namespaces;

  /// Normalized label of a dct:format or dcat:mediaType value.
  std::string format_label(const dcat::Term& value) const;

  static Vocabularies from_json(const Json& doc);
  /// data/mqa-vocabularies.json
  static const Vocabularies& bundled();
};

struct MqaConfig {
  std::vector<Indicator> indicators;
  RatingThresholds thresholds;
  Vocabularies vocabularies;

  int max_possible() const;

  /// `{"thresholds": {...}, "indicators": [...], "vocabularies": {...}}`.
  /// Missing sections fall back to the defaults.
  static MqaConfig from_json(const Json& doc);
  static MqaConfig load(const std::string& path);
  /// The 23-indicator, 405-point table.
  static const MqaConfig& defaults();
  static const Json& default_table();
};

class UrlChecker {
 public:
  virtual ~UrlChecker() = default;
  /// HTTP status for `url`; 0 when unreachable. Must be safe to call
  /// concurrently.
  virtual int status(const std::string& url) const = 0;
};

/// Offline checker answering from a fixed map.
class StatusMapUrlChecker final : public UrlChecker {
 public:
  explicit StatusMapUrlChecker(std::map<std::string, int> statuses = {}, int default_status = 200)
      : statuses_(std::move(statuses)), default_status_(default_status) {}

  int status(const std::string& url) const override;

  /// `{"default": 200, "statuses": {"http://...": 404}}`
  static StatusMapUrlChecker load(const std::string& path);

 private:
  std::map<std::string, int> statuses_;
  int default_status_;
};

/// Issues real GET requests (plain http only).
class HttpUrlChecker final : public UrlChecker {
 public:
  int status(const std::string& url) const override;
};

enum class Rating { bad, sufficient, good, excellent };
std::string_view to_string(Rating r);

Rating rate(int total, const RatingThresholds& thresholds);

struct IndicatorResult {
  std::string id;
  Dimension dimension;
  int weight = 0;
  bool passed = false;
  int points = 0;
};

struct ScoreReport {
  std::string dataset;
  std::vector<IndicatorResult> per_indicator;
  std::map<Dimension, int> per_dimension;
  int total = 0;
  int max_possible = 0;
  Rating rating = Rating::bad;

  Json to_json() const;
  std::string to_table() const;
};

/// Throws Error(not_found) when `dataset_iri` is not typed dcat:Dataset.
ScoreReport score_dataset(const dcat::Graph& g, const std::string& dataset_iri, const MqaConfig& config,
                          const UrlChecker& urls);

/// Every dcat:Dataset subject in the graph, sorted.
std::vector<std::string> dataset_iris(const dcat::Graph& g);

struct DistributionReport {
  std::size_t total = 0;
  std::map<Rating, std::size_t> counts;
  std::map<Rating, double> percentages;  // 3 decimal places

  Json to_json() const;
};

DistributionReport score_catalog(const std::vector<ScoreReport>& reports);
DistributionReport score_catalog(const std::vector<Rating>& ratings);

}  // namespace lodbridge::mqa
