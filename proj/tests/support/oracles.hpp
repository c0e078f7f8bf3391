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
#include <random>
#include <string>
#include <vector>

#include "lodbridge/dcat/graph.hpp"
#include "lodbridge/harvester/sparql.hpp"

namespace lodbridge::testing {

/// Small random graph over a fixed vocabulary, with blank nodes and
/// literals that carry languages, datatypes and characters needing escapes.
dcat::Graph random_graph(std::mt19937& rng, std::size_t max_triples);

/// A 1-3 pattern SELECT over terms drawn from `g`, optionally with a regex
/// filter, DISTINCT and LIMIT.
std::string random_query(std::mt19937& rng, const dcat::Graph& g);

/// Pattern-at-a-time relational join: one binding table per pattern, joined
/// left to right with nested loops over rows.
harvester::ResultTable naive_join(const harvester::QueryPlan& plan, const dcat::Graph& g);

/// Tries every bijection between the blank nodes of `a` and `b`.
bool brute_isomorphic(const dcat::Graph& a, const dcat::Graph& b);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

/// Parses one N-Triples line with IRIs, blank nodes and simple or typed
/// literals (no escapes beyond \" and \\).
dcat::Triple parse_ntriple(const std::string& line);

/// Closed form of the synthetic bike feed: available bikes at `station`
/// (0 or 1) for hour index `i` counted from Monday 2021-11-01T00:00Z.
int bike_feed_value(int station, int i);

}  // namespace lodbridge::testing
