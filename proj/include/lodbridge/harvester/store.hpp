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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lodbridge/common/http.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::harvester {

struct SourcePortal {
  std::string id;
  std::string endpoint;
  dcat::Format format = dcat::Format::rdfxml;
  std::optional<Timestamp> last_harvest;
};

Json to_json(const SourcePortal& s);
SourcePortal source_from_json(const Json& doc);
/// A JSON list of sources.
std::vector<SourcePortal> load_sources(const std::string& path);

struct Provenance {
  std::string endpoint;
  Timestamp harvested_at{};
  std::size_t dataset_count = 0;
};

struct HarvestReport {
  std::string source_id;
  bool ok = false;
  std::size_t added = 0;
  std::size_t updated = 0;
  std::size_t removed = 0;
  std::string error;

  Json to_json() const;
};

/// IRIs of every dcat:Dataset subject, sorted.
std::vector<std::string> dataset_iris(const dcat::Graph& g);

using Fetcher = std::function<http::Response(const std::string& url)>;

/// One named graph per source portal. Only catalog metadata is stored;
/// payload URLs stay pointers. With a directory, state lives in
/// `<dir>/sources.json`, `<dir>/provenance.json` and `<dir>/graphs/<id>.ttl`.
class NamedGraphStore {
 public:
  explicit NamedGraphStore(std::optional<std::filesystem::path> dir = std::nullopt,
                           std::shared_ptr<Clock> clock = system_clock());

  /// Adds or replaces the source definition. Throws Error(validation) on a
  /// bad slug or a relative endpoint.
  void add_source(const SourcePortal& source);
  std::vector<SourcePortal> sources() const;

  /// Fetches, parses and swaps in the source's graph. Failures leave the
  /// previous graph untouched and are reported, not thrown (except for an
  /// unknown source id).
  HarvestReport harvest(const std::string& source_id, const Fetcher& fetch = default_fetcher());

  /// Installs a parsed graph directly (used by harvest and by tests).
  HarvestReport replace(const std::string& source_id, const dcat::Graph& graph);

  std::shared_ptr<const dcat::Graph> graph(const std::string& source_id) const;
  std::map<std::string, Provenance> provenance() const;

  /// Union of all named graphs, taken under one read lock. Blank nodes are
  /// already scoped per source, so the union never merges them.
  dcat::Graph union_graph() const;

  static Fetcher default_fetcher();

 private:
  std::mutex& source_lock(const std::string& id);
  void save_sources() const;
  void save_provenance() const;
  void load();

  std::optional<std::filesystem::path> dir_;
  std::shared_ptr<Clock> clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, SourcePortal> sources_;
  std::map<std::string, std::shared_ptr<const dcat::Graph>> graphs_;
  std::map<std::string, Provenance> provenance_;
  std::mutex locks_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> source_locks_;
};

}  // namespace lodbridge::harvester
