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
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lodbridge/catalog/model.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::catalog {

struct SearchQuery {
  std::optional<std::string> free_text;
  std::vector<std::string> tags;             // all must be present
  std::optional<std::string> organization;
  std::optional<std::string> format;         // any resource with this format
};

/// Number of fields (title, description, each tag) that contain `free_text`
/// case-insensitively.
std::size_t match_count(const DatasetRecord& ds, const std::string& free_text);
bool matches(const DatasetRecord& ds, const SearchQuery& query);

/// Organizations, datasets and resources. With a data directory every
/// record is stored as `<dir>/organizations/<id>.json` or
/// `<dir>/datasets/<id>.json` and the index is rebuilt from those files on
/// construction.
class Catalog {
 public:
  explicit Catalog(std::optional<std::filesystem::path> data_dir = std::nullopt,
                   std::shared_ptr<Clock> clock = system_clock());

  std::string create_organization(const Organization& org);
  std::optional<Organization> find_organization(const std::string& id) const;
  Organization get_organization(const std::string& id) const;
  std::vector<Organization> organizations() const;
  /// Rejected with Error(conflict) while the organization owns datasets.
  void delete_organization(const std::string& id);

  /// An empty id is derived from the title. issued and modified are stamped
  /// from the clock.
  std::string create_dataset(DatasetRecord ds);
  /// Replaces title, description, tags, license and themes. Resources and
  /// issued are kept; modified is bumped only when something changed.
  DatasetRecord update_dataset(const DatasetRecord& metadata);
  std::optional<DatasetRecord> find_dataset(const std::string& id) const;
  DatasetRecord get_dataset(const std::string& id) const;
  std::vector<DatasetRecord> datasets() const;
  void delete_dataset(const std::string& id);

  /// Adds or replaces by resource id (derived from the title when empty)
  /// and bumps dataset.modified. An identical resource is a no-op.
  std::string upsert_resource(const std::string& dataset_id, Resource res);

  /// Ordered by match count (descending), then slug.
  std::vector<DatasetRecord> search(const SearchQuery& query, std::size_t limit = 1000) const;

 private:
  void persist(const Organization& org) const;
  void persist(const DatasetRecord& ds) const;
  void unpersist(const std::string& kind, const std::string& id) const;
  void load();

  std::optional<std::filesystem::path> dir_;
  std::shared_ptr<Clock> clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, Organization> orgs_;
  std::map<std::string, DatasetRecord> datasets_;
};

}  // namespace lodbridge::catalog
