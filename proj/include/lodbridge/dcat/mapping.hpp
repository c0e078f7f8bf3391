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
#include <string>
#include <string_view>
#include <vector>

#include "lodbridge/catalog/model.hpp"
#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::dcat {

enum class Profile { dcat, dcat_ap };

std::optional<Profile> profile_from_name(std::string_view name);

/// CKAN license id -> license IRI.
class LicenseTable {
 public:
  LicenseTable() = default;
  explicit LicenseTable(std::map<std::string, std::string> entries) : entries_(std::move(entries)) {}

  std::optional<std::string> iri(const std::string& license_id) const;

  static LicenseTable load(const std::string& path);
  /// data/licenses.json
  static const LicenseTable& bundled();

 private:
  std::map<std::string, std::string> entries_;
};

struct PortalIdentity {
  std::string base_url;  // no trailing slash
  std::string title;
  std::string description;
  std::string publisher_name;
};

std::string dataset_iri(std::string_view portal_base, std::string_view dataset_slug);
std::string distribution_iri(std::string_view portal_base, std::string_view dataset_slug,
                             std::string_view resource_slug);
std::string organization_iri(std::string_view portal_base, std::string_view org_slug);
std::string catalog_iri(std::string_view portal_base);

/// Vocabulary IRIs used by the dcat_ap profile.
std::string file_type_iri(std::string_view format);
std::string media_type_iri(std::string_view media_type);

Graph dataset_to_dcat(const catalog::DatasetRecord& ds, const catalog::Organization& org,
                      Profile profile, std::string_view portal_base,
                      const LicenseTable& licenses = LicenseTable::bundled());

/// `organizations` must hold the owner of every dataset.
Graph catalog_to_dcat(const std::vector<catalog::DatasetRecord>& datasets,
                      const std::map<std::string, catalog::Organization>& organizations,
                      const PortalIdentity& portal, Profile profile,
                      const LicenseTable& licenses = LicenseTable::bundled());

}  // namespace lodbridge::dcat
