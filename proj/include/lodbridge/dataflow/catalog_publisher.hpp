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
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/entity/entity.hpp"

namespace lodbridge::catalog {
class CatalogApi;
}

namespace lodbridge::dataflow {

struct MetadataParams {
  std::string title_template;
  std::string description_template;
  std::vector<std::string> tags;
  std::optional<std::string> license;
  std::vector<std::string> themes;

  static MetadataParams from_json(const Json& doc);
};

struct DatasetMetadata {
  std::string title;
  std::string description;
  std::vector<std::string> tags;
  std::optional<std::string> license;
  std::vector<std::string> themes;
  Timestamp modified{};

  Json to_json() const;
  static DatasetMetadata from_json(const Json& doc);

  friend bool operator==(const DatasetMetadata&, const DatasetMetadata&) = default;
};

/// Templates see the entity's keyValues document (`${id}`, `${type}`,
/// `${address.addressLocality}`). Throws Error(not_found) when a variable
/// does not resolve.
DatasetMetadata generate_catalog_metadata(const entity::Entity& entity, const MetadataParams& params,
                                          const Clock& clock);

struct PublicationParams {
  std::string organization;
  std::string organization_title;
  std::optional<std::string> organization_description;
  /// Public broker base (required); resources point at
  /// `<base>/ngsi-ld/v1/entities/<id>`.
  std::string broker_url;
  /// Optional; interpolated against the entity. Defaults to the metadata
  /// title slug, else `<organization>-<type>`.
  std::optional<std::string> dataset_id_template;
  std::string resource_title_template = "${id}";
  std::string resource_format = "JSON";
  std::string resource_media_type = "application/ld+json";

  static PublicationParams from_json(const Json& doc);
};

struct CatalogPublicationResult {
  bool organization_created = false;
  std::vector<std::string> datasets_created;
  std::vector<std::string> datasets_updated;
  std::vector<std::string> resources;  // "<dataset>/<resource>"

  Json to_json() const;
};

/// Accepts a notification body (`{subscriptionId, notifiedAt, data}`), a
/// list of entity documents or a single entity document. Catalog failures
/// propagate as the client's Error (unavailable for transport problems).
CatalogPublicationResult publish_dataset_to_catalog(const Json& notification, const PublicationParams& params,
                                                    catalog::CatalogApi& catalog,
                                                    const std::optional<DatasetMetadata>& metadata = std::nullopt);

/// Entity documents carried by a payload in any of the shapes above.
std::vector<Json> entity_documents(const Json& payload);

}  // namespace lodbridge::dataflow
