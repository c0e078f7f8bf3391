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

#include <gtest/gtest.h>

#include <numeric>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/dcat/graph.hpp"
#include "lodbridge/mqa/mqa.hpp"

using namespace lodbridge;
using namespace lodbridge::mqa;

namespace {

const std::string kFixtures = LODBRIDGE_FIXTURES_DIR;
const std::string kWeather = "http://catalog.santander.example/dataset/santander-aemet-weather";

dcat::Term p(std::string_view curie) { return dcat::Term::iri(dcat::expand(curie)); }

std::map<std::string, bool> passed_by_id(const ScoreReport& r) {
  std::map<std::string, bool> out;
  for (const auto& i : r.per_indicator) out[i.id] = i.passed;
  return out;
}

}  // namespace

TEST(Config, DefaultTable) {
  const auto& c = MqaConfig::defaults();
  EXPECT_EQ(c.indicators.size(), 23u);
  EXPECT_EQ(c.max_possible(), 405);
  std::map<Dimension, int> dims;
  for (const auto& i : c.indicators) dims[i.dimension] += i.weight;
  EXPECT_EQ(dims[Dimension::findability], 100);
  EXPECT_EQ(dims[Dimension::accessibility], 100);
  EXPECT_EQ(dims[Dimension::interoperability], 110);
  EXPECT_EQ(dims[Dimension::reusability], 75);
  EXPECT_EQ(dims[Dimension::contextuality], 20);
}

TEST(Rate, BoundariesAndMonotonicity) {
  const RatingThresholds t;
  EXPECT_EQ(rate(0, t), Rating::bad);
  EXPECT_EQ(rate(120, t), Rating::bad);
  EXPECT_EQ(rate(121, t), Rating::sufficient);
  EXPECT_EQ(rate(220, t), Rating::sufficient);
  EXPECT_EQ(rate(221, t), Rating::good);
  EXPECT_EQ(rate(350, t), Rating::good);
  EXPECT_EQ(rate(351, t), Rating::excellent);
  EXPECT_EQ(rate(405, t), Rating::excellent);
  for (int s = 1; s <= 405; ++s) EXPECT_LE(rate(s - 1, t), rate(s, t)) << s;
  RatingThresholds inverted{100, 200, 50};
  EXPECT_THROW(inverted.check(), Error);
}

TEST(Score, EmptyMetadataScoresZero) {
  dcat::Graph g;
  g.add(dcat::Term::iri("http://ex.org/d"), p("rdf:type"), p("dcat:Dataset"));
  const auto r = score_dataset(g, "http://ex.org/d", MqaConfig::defaults(), StatusMapUrlChecker());
  EXPECT_EQ(r.total, 0);
  EXPECT_EQ(r.rating, Rating::bad);
  EXPECT_EQ(r.max_possible, 405);
  EXPECT_EQ(r.per_indicator.size(), 23u);
}

TEST(Score, UntypedNodeIsNotFound) {
  dcat::Graph g;
  g.add(dcat::Term::iri("http://ex.org/d"), p("dct:title"), dcat::Term::literal("t"));
  try {
    score_dataset(g, "http://ex.org/d", MqaConfig::defaults(), StatusMapUrlChecker());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
}

TEST(Score, WeatherListingPinned) {
  const auto g = dcat::parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  EXPECT_EQ(dataset_iris(g), std::vector<std::string>{kWeather});
  const auto r = score_dataset(g, kWeather, MqaConfig::defaults(), StatusMapUrlChecker());
  // keywords 30, themes 30, access-url-status 50, download-url-status 30
  // (accessURL fallback), format 20, media-type 10, format-vocabulary 10,
  // format-non-proprietary 20, format-machine-readable 20,
  // dcat-ap-conformance 30, publisher 10.
  EXPECT_EQ(r.total, 260);
  EXPECT_EQ(r.rating, Rating::good);
  const auto passed = passed_by_id(r);
  for (const auto* id : {"keywords", "themes", "access-url-status", "download-url-status", "format", "media-type",
                         "format-vocabulary", "format-non-proprietary", "format-machine-readable",
                         "dcat-ap-conformance", "publisher"}) {
    EXPECT_TRUE(passed.at(id)) << id;
  }
  for (const auto* id : {"spatial", "temporal", "download-url", "license", "issued", "modified", "byte-size"}) {
    EXPECT_FALSE(passed.at(id)) << id;
  }
  int sum = 0;
  for (const auto& [d, pts] : r.per_dimension) sum += pts;
  EXPECT_EQ(sum, r.total);
}

TEST(Score, BrokenAccessUrlCostsItsPoints) {
  const auto g = dcat::parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  const StatusMapUrlChecker broken({}, 404);
  const auto r = score_dataset(g, kWeather, MqaConfig::defaults(), broken);
  const auto passed = passed_by_id(r);
  EXPECT_FALSE(passed.at("access-url-status"));
  EXPECT_FALSE(passed.at("download-url-status"));
  EXPECT_EQ(r.total, 260 - 50 - 30);
}

TEST(Score, FullFixtureIsExcellent) {
  const auto g = dcat::parse_turtle(read_text_file(kFixtures + "/mqa/full.ttl"));
  const auto urls = StatusMapUrlChecker::load(kFixtures + "/mqa/url-status.json");
  const auto r = score_dataset(g, "http://mqa.example/dataset/full", MqaConfig::defaults(), urls);
  EXPECT_EQ(r.total, 405);
  EXPECT_EQ(r.rating, Rating::excellent);
}

TEST(Score, CustomTableAndThresholds) {
  const auto config = MqaConfig::from_json(parse_json(R"({
      "thresholds": {"excellent": 30, "good": 20, "sufficient": 10},
      "indicators": [
        {"id": "kw", "dimension": "Findability", "weight": 15, "check": "property-present", "properties": ["dcat:keyword"]},
        {"id": "pub", "dimension": "Contextuality", "weight": 15, "check": "property-present", "properties": ["dct:publisher"]}
      ]})"));
  EXPECT_EQ(config.max_possible(), 30);
  const auto g = dcat::parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  const auto r = score_dataset(g, kWeather, config, StatusMapUrlChecker());
  EXPECT_EQ(r.total, 30);
  EXPECT_EQ(r.rating, Rating::excellent);
  EXPECT_THROW(MqaConfig::from_json(parse_json(R"({"indicators": [{"id": "x", "weight": -1}]})")), Error);
}

TEST(Catalog, EmptyDistribution) {
  const auto d = score_catalog(std::vector<Rating>{});
  EXPECT_EQ(d.total, 0u);
  for (const auto r : {Rating::bad, Rating::sufficient, Rating::good, Rating::excellent}) {
    EXPECT_EQ(d.counts.at(r), 0u);
    EXPECT_EQ(d.percentages.at(r), 0.0);
  }
}

TEST(Catalog, PercentagesRoundToThreeDecimals) {
  const auto d = score_catalog(std::vector<Rating>{Rating::good, Rating::good, Rating::bad});
  EXPECT_EQ(d.counts.at(Rating::good), 2u);
  EXPECT_DOUBLE_EQ(d.percentages.at(Rating::good), 66.667);
  EXPECT_DOUBLE_EQ(d.percentages.at(Rating::bad), 33.333);
  const auto json = d.to_json();
  EXPECT_EQ(json.at("total"), 3);
  EXPECT_EQ(json.at("counts").at("excellent"), 0);
}

TEST(Report, JsonAndTable) {
  const auto g = dcat::parse_rdfxml(read_text_file(kFixtures + "/weather.rdf"));
  const auto r = score_dataset(g, kWeather, MqaConfig::defaults(), StatusMapUrlChecker());
  const auto json = r.to_json();
  EXPECT_EQ(json.at("total"), 260);
  EXPECT_EQ(json.at("rating"), "good");
  EXPECT_NE(r.to_table().find("260"), std::string::npos);
}
