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

#include "lodbridge/catalog/model.hpp"

#include "lodbridge/common/error.hpp"

namespace lodbridge::catalog {

namespace {

std::string required_string(const Json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_string()) {
    throw Error(Errc::validation, std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const Json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw Error(Errc::validation, std::string("field '") + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const Json& doc, const char* key, const char* inner = nullptr) {
  std::vector<std::string> out;
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return out;
  if (!it->is_array()) throw Error(Errc::validation, std::string("field '") + key + "' must be a list");
  for (const auto& item : *it) {
    if (item.is_string()) out.push_back(item.get<std::string>());
    else if (inner != nullptr && item.is_object()) out.push_back(required_string(item, inner));
    else throw Error(Errc::validation, std::string("bad entry in '") + key + "'");
  }
  return out;
}

}  // namespace

const Resource* DatasetRecord::find_resource(const std::string& resource_id) const {
  for (const auto& r : resources) {
    if (r.id == resource_id) return &r;
  }
  return nullptr;
}

Json to_json(const Organization& org) {
  Json out{{"name", org.id}, {"title", org.display_name}};
  if (org.description) out["description"] = *org.description;
  return out;
}

Json to_json(const Resource& res) {
  Json out{{"id", res.id}, {"name", res.title}, {"url", res.access_url}};
  if (res.download_url) out["download_url"] = *res.download_url;
  out["format"] = res.format;
  if (res.media_type) out["mimetype"] = *res.media_type;
  if (res.byte_size) out["size"] = *res.byte_size;
  return out;
}

Json to_json(const DatasetRecord& ds) {
  Json tags = Json::array();
  for (const auto& t : ds.tags) tags.push_back(Json{{"name", t}});
  Json resources = Json::array();
  for (const auto& r : ds.resources) resources.push_back(to_json(r));
  Json out{{"name", ds.id},          {"title", ds.title}, {"notes", ds.description},
           {"owner_org", ds.organization_id}, {"tags", tags}};
  if (ds.license_id) out["license_id"] = *ds.license_id;
  out["themes"] = ds.themes;
  out["metadata_created"] = format_utc(ds.issued);
  out["metadata_modified"] = format_utc(ds.modified);
  out["resources"] = resources;
  return out;
}

Organization organization_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::validation, "organization must be an object");
  Organization org;
  org.id = required_string(doc, "name");
  org.display_name = optional_string(doc, "title").value_or(org.id);
  org.description = optional_string(doc, "description");
  return org;
}

Resource resource_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::validation, "resource must be an object");
  Resource res;
  res.access_url = required_string(doc, "url");
  res.title = optional_string(doc, "name").value_or("");
  res.id = optional_string(doc, "id").value_or("");
  res.download_url = optional_string(doc, "download_url");
  res.format = optional_string(doc, "format").value_or("");
  res.media_type = optional_string(doc, "mimetype");
  if (auto it = doc.find("size"); it != doc.end() && !it->is_null()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw Error(Errc::validation, "field 'size' must be a non-negative integer");
    }
    res.byte_size = it->get<std::uint64_t>();
  }
  return res;
}

DatasetRecord dataset_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::validation, "dataset must be an object");
  DatasetRecord ds;
  ds.id = required_string(doc, "name");
  ds.title = optional_string(doc, "title").value_or("");
  ds.description = optional_string(doc, "notes").value_or("");
  ds.organization_id = required_string(doc, "owner_org");
  ds.tags = string_list(doc, "tags", "name");
  ds.license_id = optional_string(doc, "license_id");
  ds.themes = string_list(doc, "themes");
  if (auto created = optional_string(doc, "metadata_created")) ds.issued = parse_timestamp(*created);
  if (auto modified = optional_string(doc, "metadata_modified")) ds.modified = parse_timestamp(*modified);
  if (auto it = doc.find("resources"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(Errc::validation, "field 'resources' must be a list");
    for (const auto& r : *it) ds.resources.push_back(resource_from_json(r));
  }
  return ds;
}

}  // namespace lodbridge::catalog
