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

#include <chrono>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace lodbridge::testing {

struct CriterionResult {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  std::chrono::milliseconds budget;
  std::function<CriterionResult()> run;
};

/// The ten acceptance criteria in order.
std::vector<Criterion> acceptance_criteria();

CriterionResult transform_listing();
CriterionResult dcat_ap_listing();
CriterionResult sparql_listing();
CriterionResult mqa_distribution();
CriterionResult publish_subscribe_contract(std::size_t operations = 1000, unsigned seed = 20211110);
CriterionResult query_oracle_equivalence(std::size_t graphs = 200, unsigned seed = 7);
CriterionResult round_trips(std::size_t graphs = 200, unsigned seed = 11);
CriterionResult idempotence_and_conservation(std::size_t pipelines = 20, unsigned seed = 13);
CriterionResult mqa_differential();
CriterionResult end_to_end_scenario();

}  // namespace lodbridge::testing
