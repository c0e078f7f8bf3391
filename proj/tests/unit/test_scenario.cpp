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

#include <fstream>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/scenario/scenario.hpp"
#include "oracles.hpp"

using namespace lodbridge;
using namespace lodbridge::scenario;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = LODBRIDGE_FIXTURES_DIR;

}  // namespace

TEST(Scenario, EmptyFixturesStopAtLoad) {
  const auto work = lodbridge::testing::temp_dir("scenario-empty");
  auto options = ScenarioOptions::defaults(work / "run");
  options.fixtures_dir = work / "no-fixtures";
  fs::create_directories(options.fixtures_dir);
  const auto report = run_scenario(options);
  EXPECT_FALSE(report.passed);
  ASSERT_EQ(report.steps.size(), 1u);
  EXPECT_EQ(report.steps[0].name, "load-fixtures");
  EXPECT_FALSE(report.steps[0].passed);
  EXPECT_FALSE(report.steps[0].error.empty());
  const auto written = read_json_file((work / "run" / "scenario-report.json").string());
  EXPECT_EQ(written.at("passed"), false);
}

TEST(Scenario, TamperedFixtureFailsTheChecksum) {
  const auto work = lodbridge::testing::temp_dir("scenario-tampered");
  const auto copy = work / "fixtures";
  fs::copy(kFixtures, copy, fs::copy_options::recursive);
  {
    std::ofstream out(copy / "aemet.json", std::ios::app);
    out << " ";
  }
  auto options = ScenarioOptions::defaults(work / "run");
  options.fixtures_dir = copy;
  const auto report = run_scenario(options);
  EXPECT_FALSE(report.passed);
  ASSERT_EQ(report.steps.size(), 1u);
  EXPECT_NE(report.steps[0].error.find("aemet.json"), std::string::npos) << report.steps[0].error;
}

TEST(Scenario, FullRunPassesEveryStep) {
  const auto work = lodbridge::testing::temp_dir("scenario-full");
  const auto report = run_scenario(ScenarioOptions::defaults(work));
  ASSERT_TRUE(report.passed) << dump_compact(report.to_json());
  EXPECT_EQ(report.steps.size(), 12u);
  std::set<std::string> phases;
  for (const auto& s : report.steps) phases.insert(s.phase);
  EXPECT_EQ(phases, (std::set<std::string>{kCreation, kHarmonization, kPublication, kCuration, kDiscovery,
                                           kExploitation}));
  for (const auto* artifact : {"scenario-report.json", "scenario-timings.json", "broker-snapshot.json",
                               "mqa-report.json", "query-result.json", "exports/catalog.rdf",
                               "exports/santander-aemet-weather.rdf"}) {
    EXPECT_TRUE(fs::exists(work / artifact)) << artifact;
  }
  const auto query = read_json_file((work / "query-result.json").string());
  EXPECT_EQ(query.at("results").at("bindings").size(), 1u);
  EXPECT_EQ(read_json_file((work / "scenario-report.json").string()), report.to_json());
}

TEST(FeedCellMean, MatchesTheGeneratorFormula) {
  // Thursday 08:00 cells over the one-week hourly feed.
  const auto at = parse_timestamp("2021-11-18T08:00:00Z");
  for (int station = 0; station < 2; ++station) {
    const std::string id = "urn:BikeHireDockingStation:santander-0" + std::to_string(station + 1);
    // Hour index from Monday 2021-11-01: Thursday is day 3.
    const int first = 3 * 24 + 8;
    double expected = 0;
    int n = 0;
    for (int i = first; i < 168; i += 168) {
      expected += lodbridge::testing::bike_feed_value(station, i);
      ++n;
    }
    EXPECT_DOUBLE_EQ(feed_cell_mean(kFixtures / "bike-feed.jsonl", id, at), expected / n) << id;
  }
  EXPECT_THROW(feed_cell_mean(kFixtures / "bike-feed.jsonl", "urn:BikeHireDockingStation:ghost", at), Error);
}
