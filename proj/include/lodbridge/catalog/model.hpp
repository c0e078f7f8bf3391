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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::catalog {

struct Organization {
  std::string id;
  std::string display_name;
  std::optional<std::string> description;

  friend bool operator==(const Organization&, const Organization&) = default;
};

struct Resource {
  std::string id;
  std::string title;
  std::string access_url;
  std::optional<std::string> download_url;
  std::string format;
  std::optional<std::string> media_type;
  std::optional<std::uint64_t> byte_size;

  friend bool operator==(const Resource&, const Resource&) = default;
};

struct DatasetRecord {
  std::string id;
  std::string title;
  std::string description;
  std::string organization_id;
  std::vector<std::string> tags;
  std::optional<std::string> license_id;
  std::vector<std::string> themes;
  Timestamp issued{};
  Timestamp modified{};
  std::vector<Resource> resources;

  const Resource* find_resource(const std::string& resource_id) const;

  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

// Wire shapes follow the CKAN action API field names (name, title, notes,
// owner_org, tags[{name}], url, mimetype, size, ...).
Json to_json(const Organization& org);
Json to_json(const Resource& res);
Json to_json(const DatasetRecord& ds);

/// Throws Error(validation) on missing or mistyped fields.
Organization organization_from_json(const Json& doc);
Resource resource_from_json(const Json& doc);
/// `issued`/`modified` default to the epoch when absent; the catalog stamps
/// them on write.
DatasetRecord dataset_from_json(const Json& doc);

}  // namespace lodbridge::catalog
