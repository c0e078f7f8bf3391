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

#include "lodbridge/dataflow/catalog_publisher.hpp"

#include <algorithm>

#include "lodbridge/catalog/client.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/dataflow/transform.hpp"
#include "lodbridge/entity/representation.hpp"

namespace lodbridge::dataflow {

namespace {

std::vector<std::string> string_list(const Json& doc, const char* key) {
  std::vector<std::string> out;
  if (!doc.contains(key)) return out;
  for (const auto& v : doc.at(key)) out.push_back(v.get<std::string>());
  return out;
}

std::optional<std::string> optional_string(const Json& doc, const char* key) {
  if (!doc.contains(key) || doc.at(key).is_null()) return std::nullopt;
  return doc.at(key).get<std::string>();
}

}  // namespace

MetadataParams MetadataParams::from_json(const Json& doc) {
  MetadataParams p;
  try {
    p.title_template = doc.at("titleTemplate").get<std::string>();
    p.description_template = doc.at("descriptionTemplate").get<std::string>();
    p.tags = string_list(doc, "tags");
    p.license = optional_string(doc, "license");
    p.themes = string_list(doc, "themes");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad metadata params: ") + e.what());
  }
  return p;
}

Json DatasetMetadata::to_json() const {
  Json doc = {{"title", title}, {"description", description}, {"tags", tags}};
  doc["license"] = license ? Json(*license) : Json(nullptr);
  doc["themes"] = themes;
  doc["modified"] = format_utc(modified);
  return doc;
}

DatasetMetadata DatasetMetadata::from_json(const Json& doc) {
  DatasetMetadata m;
  try {
    m.title = doc.at("title").get<std::string>();
    m.description = doc.value("description", "");
    m.tags = string_list(doc, "tags");
    m.license = optional_string(doc, "license");
    m.themes = string_list(doc, "themes");
    if (doc.contains("modified")) m.modified = parse_timestamp(doc.at("modified").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed, std::string("bad dataset metadata: ") + e.what());
  }
  return m;
}

DatasetMetadata generate_catalog_metadata(const entity::Entity& entity, const MetadataParams& params,
                                          const Clock& clock) {
  const Json doc = entity::to_key_values(entity);
  DatasetMetadata m;
  m.title = interpolate(params.title_template, doc);
  m.description = interpolate(params.description_template, doc);
  m.tags = params.tags;
  m.license = params.license;
  m.themes = params.themes;
  m.modified = clock.now();
  return m;
}

PublicationParams PublicationParams::from_json(const Json& doc) {
  PublicationParams p;
  try {
    p.organization = doc.at("organization").get<std::string>();
    p.organization_title = doc.value("organizationTitle", p.organization);
    p.organization_description = optional_string(doc, "organizationDescription");
    p.broker_url = doc.at("brokerPublicUrl").get<std::string>();
    p.dataset_id_template = optional_string(doc, "datasetIdTemplate");
    p.resource_title_template = doc.value("resourceTitleTemplate", p.resource_title_template);
    p.resource_format = doc.value("resourceFormat", p.resource_format);
    p.resource_media_type = doc.value("resourceMediaType", p.resource_media_type);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad publication params: ") + e.what());
  }
  if (!text::is_valid_slug(p.organization)) {
    throw Error(Errc::validation, "organization '" + p.organization + "' is not a valid slug");
  }
  return p;
}

Json CatalogPublicationResult::to_json() const {
  return {{"organizationCreated", organization_created},
          {"datasetsCreated", datasets_created},
          {"datasetsUpdated", datasets_updated},
          {"resources", resources}};
}

std::vector<Json> entity_documents(const Json& payload) {
  if (payload.is_array()) return {payload.begin(), payload.end()};
  if (payload.is_object() && payload.contains("data") && payload.at("data").is_array()) {
    return {payload.at("data").begin(), payload.at("data").end()};
  }
  if (payload.is_object()) return {payload};
  throw Error(Errc::malformed, "payload carries no entity documents");
}

CatalogPublicationResult publish_dataset_to_catalog(const Json& notification, const PublicationParams& params,
                                                    catalog::CatalogApi& catalog,
                                                    const std::optional<DatasetMetadata>& metadata) {
  CatalogPublicationResult result;
  const auto documents = entity_documents(notification);
  if (!catalog.find_organization(params.organization)) {
    catalog.create_organization({params.organization, params.organization_title, params.organization_description});
    result.organization_created = true;
  }
  for (const auto& doc : documents) {
    const auto entity = entity::from_document(doc);
    const Json kv = entity::to_key_values(entity);

    std::string dataset_id;
    if (params.dataset_id_template) dataset_id = text::slugify(interpolate(*params.dataset_id_template, kv));
    else if (metadata) dataset_id = text::slugify(metadata->title);
    else dataset_id = params.organization + "-" + text::slugify(entity.type());

    auto existing = catalog.find_dataset(dataset_id);
    if (!existing) {
      catalog::DatasetRecord ds;
      ds.id = dataset_id;
      ds.organization_id = params.organization;
      if (metadata) {
        ds.title = metadata->title;
        ds.description = metadata->description;
        ds.tags = metadata->tags;
        ds.license_id = metadata->license;
        ds.themes = metadata->themes;
      } else {
        ds.title = entity.type() + " (" + params.organization_title + ")";
        ds.description = "NGSI-LD " + entity.type() + " entities published by " + params.organization_title;
      }
      catalog.create_dataset(ds);
      result.datasets_created.push_back(dataset_id);
    } else if (metadata) {
      auto ds = *existing;
      ds.title = metadata->title;
      ds.description = metadata->description;
      ds.tags = metadata->tags;
      ds.license_id = metadata->license;
      ds.themes = metadata->themes;
      if (!(ds == *existing)) {
        catalog.update_dataset(ds);
        if (std::find(result.datasets_updated.begin(), result.datasets_updated.end(), dataset_id) ==
            result.datasets_updated.end()) {
          result.datasets_updated.push_back(dataset_id);
        }
      }
    }

    catalog::Resource res;
    res.id = text::slugify(entity.id().str());
    res.title = interpolate(params.resource_title_template, kv);
    res.access_url = params.broker_url + "/ngsi-ld/v1/entities/" + text::url_encode(entity.id().str());
    res.format = params.resource_format;
    res.media_type = params.resource_media_type;
    res.byte_size = dump_compact(entity::to_normalized(entity)).size();
    catalog.upsert_resource(dataset_id, res);
    result.resources.push_back(dataset_id + "/" + res.id);
  }
  return result;
}

}  // namespace lodbridge::dataflow
