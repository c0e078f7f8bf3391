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

#include <filesystem>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::scenario {

inline constexpr const char* kCatalogPublicBase = "http://catalog.santander.example";
inline constexpr const char* kBrokerPublicBase = "http://broker.santander.example";
inline constexpr const char* kBikeDatasetIri = "http://datos.santander.example/dataset/bicycle-stations";

/// Life-cycle phases steps are labelled with.
inline constexpr const char* kCreation = "Creation & Selection";
inline constexpr const char* kHarmonization = "Harmonization";
inline constexpr const char* kPublication = "Publication & Linking";
inline constexpr const char* kCuration = "Curation";
inline constexpr const char* kDiscovery = "Discovery & Exploration";
inline constexpr const char* kExploitation = "Exploitation";

struct ScenarioOptions {
  std::filesystem::path workdir;
  std::filesystem::path fixtures_dir;
  Timestamp clock_start{};
  std::string probe_station = "urn:BikeHireDockingStation:santander-01";
  Timestamp probe_at{};

  /// Bundled fixtures, clock pinned at 2021-11-10T16:00:00Z, probe on
  /// Thursday 2021-11-18T08:00:00Z.
  static ScenarioOptions defaults(std::filesystem::path workdir);
};

struct StepResult {
  std::string name;
  std::string phase;
  bool passed = false;
  Json detail = Json::object();
  std::string error;
  std::vector<std::string> logs;  // captured only on failure
  double duration_ms = 0;
};

struct ScenarioReport {
  std::vector<StepResult> steps;
  bool passed = false;

  const StepResult* find(const std::string& name) const;
  /// Deterministic under the pinned clock; durations are left out.
  Json to_json() const;
  Json timings() const;
};

/// Runs every step in order, stopping at the first failure. Artifacts and
/// `scenario-report.json` go under the workdir.
ScenarioReport run_scenario(const ScenarioOptions& options);

/// Independent (station, hour-of-week) mean over a bike feed jsonl file.
double feed_cell_mean(const std::filesystem::path& feed, const std::string& station, Timestamp at);

}  // namespace lodbridge::scenario
