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

#include "lodbridge/dcat/mapping.hpp"

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::dcat {

namespace {

Term iri(std::string_view curie) { return Term::iri(expand(curie)); }

Term plain(std::string value) { return Term::literal(std::move(value)); }

Term date_time(Timestamp t) { return Term::literal(format_utc(t), expand("xsd:dateTime")); }

}  // namespace

std::optional<Profile> profile_from_name(std::string_view name) {
  if (name == "dcat") return Profile::dcat;
  if (name == "dcat_ap" || name == "dcat-ap") return Profile::dcat_ap;
  return std::nullopt;
}

std::optional<std::string> LicenseTable::iri(const std::string& license_id) const {
  auto it = entries_.find(license_id);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

LicenseTable LicenseTable::load(const std::string& path) {
  const auto doc = read_json_file(path);
  std::map<std::string, std::string> entries;
  for (const auto& [id, value] : doc.items()) {
    if (!value.is_string()) throw Error(Errc::validation, "license '" + id + "' must map to an IRI");
    entries[id] = value.get<std::string>();
  }
  return LicenseTable(std::move(entries));
}

const LicenseTable& LicenseTable::bundled() {
  static const LicenseTable table = load(std::string(LODBRIDGE_DATA_DIR) + "/licenses.json");
  return table;
}

std::string dataset_iri(std::string_view portal_base, std::string_view dataset_slug) {
  return std::string(portal_base) + "/dataset/" + std::string(dataset_slug);
}

std::string distribution_iri(std::string_view portal_base, std::string_view dataset_slug,
                             std::string_view resource_slug) {
  return dataset_iri(portal_base, dataset_slug) + "#dist-" + std::string(resource_slug);
}

std::string organization_iri(std::string_view portal_base, std::string_view org_slug) {
  return std::string(portal_base) + "/organization/" + std::string(org_slug);
}

std::string catalog_iri(std::string_view portal_base) { return std::string(portal_base) + "/catalog"; }

std::string file_type_iri(std::string_view format) {
  return "http://publications.europa.eu/resource/authority/file-type/" + text::to_upper(format);
}

std::string media_type_iri(std::string_view media_type) {
  return "https://www.iana.org/assignments/media-types/" + text::to_lower(media_type);
}

Graph dataset_to_dcat(const catalog::DatasetRecord& ds, const catalog::Organization& org,
                      Profile profile, std::string_view portal_base, const LicenseTable& licenses) {
  Graph g;
  const bool ap = profile == Profile::dcat_ap;
  const auto type = iri("rdf:type");
  const auto node = Term::iri(dataset_iri(portal_base, ds.id));
  g.add(node, type, iri("dcat:Dataset"));
  g.add(node, iri("dct:title"), plain(ds.title));
  if (!ds.description.empty()) g.add(node, iri("dct:description"), plain(ds.description));
  for (const auto& tag : ds.tags) g.add(node, iri("dcat:keyword"), plain(tag));
  for (const auto& theme : ds.themes) g.add(node, iri("dcat:theme"), Term::iri(theme));
  if (ds.license_id) {
    if (auto license = licenses.iri(*ds.license_id)) g.add(node, iri("dct:license"), Term::iri(*license));
  }
  if (ap) {
    g.add(node, iri("dct:issued"), date_time(ds.issued));
    g.add(node, iri("dct:modified"), date_time(ds.modified));
  }

  const auto agent = Term::iri(organization_iri(portal_base, org.id));
  g.add(node, iri("dct:publisher"), agent);
  g.add(agent, type, iri("foaf:Agent"));
  g.add(agent, iri("foaf:name"), plain(org.display_name));

  for (const auto& res : ds.resources) {
    const auto dist = Term::iri(distribution_iri(portal_base, ds.id, res.id));
    g.add(node, iri("dcat:distribution"), dist);
    g.add(dist, type, iri("dcat:Distribution"));
    g.add(dist, iri("dct:title"), plain(res.title));
    g.add(dist, iri("dcat:accessURL"), Term::iri(res.access_url));
    if (res.download_url) g.add(dist, iri("dcat:downloadURL"), Term::iri(*res.download_url));
    if (!res.format.empty()) {
      g.add(dist, iri("dct:format"), ap ? Term::iri(file_type_iri(res.format)) : plain(res.format));
    }
    if (res.media_type) {
      g.add(dist, iri("dcat:mediaType"), ap ? Term::iri(media_type_iri(*res.media_type)) : plain(*res.media_type));
    }
    if (res.byte_size) {
      g.add(dist, iri("dcat:byteSize"),
            Term::literal(std::to_string(*res.byte_size), expand("xsd:nonNegativeInteger")));
    }
  }
  return g;
}

Graph catalog_to_dcat(const std::vector<catalog::DatasetRecord>& datasets,
                      const std::map<std::string, catalog::Organization>& organizations,
                      const PortalIdentity& portal, Profile profile, const LicenseTable& licenses) {
  Graph g;
  const auto node = Term::iri(catalog_iri(portal.base_url));
  const auto publisher = Term::iri(portal.base_url + "/#publisher");
  g.add(node, iri("rdf:type"), iri("dcat:Catalog"));
  g.add(node, iri("dct:title"), plain(portal.title));
  if (!portal.description.empty()) g.add(node, iri("dct:description"), plain(portal.description));
  g.add(node, iri("dct:publisher"), publisher);
  g.add(publisher, iri("rdf:type"), iri("foaf:Agent"));
  g.add(publisher, iri("foaf:name"), plain(portal.publisher_name));
  for (const auto& ds : datasets) {
    auto org = organizations.find(ds.organization_id);
    if (org == organizations.end()) {
      throw Error(Errc::not_found, "organization '" + ds.organization_id + "' is unknown");
    }
    g.add(node, iri("dcat:dataset"), Term::iri(dataset_iri(portal.base_url, ds.id)));
    g.merge(dataset_to_dcat(ds, org->second, profile, portal.base_url, licenses));
  }
  return g;
}

}  // namespace lodbridge::dcat
