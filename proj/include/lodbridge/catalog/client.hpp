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

#include <optional>
#include <string>

#include "lodbridge/catalog/catalog.hpp"
#include "lodbridge/catalog/model.hpp"

namespace lodbridge::catalog {

/// What the dataflow publishers need from a catalog, in process or remote.
class CatalogApi {
 public:
  virtual ~CatalogApi() = default;
  virtual std::optional<Organization> find_organization(const std::string& id) = 0;
  virtual void create_organization(const Organization& org) = 0;
  virtual std::optional<DatasetRecord> find_dataset(const std::string& id) = 0;
  virtual void create_dataset(const DatasetRecord& ds) = 0;
  virtual void update_dataset(const DatasetRecord& ds) = 0;
  virtual void upsert_resource(const std::string& dataset_id, const Resource& res) = 0;
};

class LocalCatalogClient final : public CatalogApi {
 public:
  explicit LocalCatalogClient(Catalog& catalog) : catalog_(catalog) {}

  std::optional<Organization> find_organization(const std::string& id) override;
  void create_organization(const Organization& org) override;
  std::optional<DatasetRecord> find_dataset(const std::string& id) override;
  void create_dataset(const DatasetRecord& ds) override;
  void update_dataset(const DatasetRecord& ds) override;
  void upsert_resource(const std::string& dataset_id, const Resource& res) override;

 private:
  Catalog& catalog_;
};

/// Talks to a CatalogServer. Transport failures raise Error(unavailable).
class HttpCatalogClient final : public CatalogApi {
 public:
  explicit HttpCatalogClient(std::string base_url) : base_(std::move(base_url)) {}

  std::optional<Organization> find_organization(const std::string& id) override;
  void create_organization(const Organization& org) override;
  std::optional<DatasetRecord> find_dataset(const std::string& id) override;
  void create_dataset(const DatasetRecord& ds) override;
  void update_dataset(const DatasetRecord& ds) override;
  void upsert_resource(const std::string& dataset_id, const Resource& res) override;

 private:
  Json call_get(const std::string& action, const std::string& query);
  Json call_post(const std::string& action, const Json& body);

  std::string base_;
};

}  // namespace lodbridge::catalog
