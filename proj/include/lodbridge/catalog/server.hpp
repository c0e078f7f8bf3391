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

#include <string>

#include "lodbridge/catalog/catalog.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/dcat/mapping.hpp"

namespace lodbridge::catalog {

/// CKAN-style action API plus DCAT exports:
///   POST /api/3/action/{organization_create,package_create,package_update,resource_create}
///   GET  /api/3/action/{package_show,package_search,organization_show,organization_list,package_list}
///   GET  /catalog.{rdf|ttl}, /dataset/{id}.{rdf|ttl}   (?profile=dcat_ap)
/// `portal.base_url` is the public base used to mint IRIs; it may differ
/// from the listening address.
class CatalogServer {
 public:
  CatalogServer(Catalog& catalog, dcat::PortalIdentity portal);

  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  std::string base_url() const { return server_.base_url(); }

 private:
  void install_routes();

  Catalog& catalog_;
  dcat::PortalIdentity portal_;
  http::Server server_;
};

/// Serializes the whole catalog (or one dataset) the way the export
/// endpoints do.
std::string export_catalog(const Catalog& catalog, const dcat::PortalIdentity& portal,
                           dcat::Profile profile, dcat::Format format);
std::string export_dataset(const Catalog& catalog, const std::string& dataset_id,
                           const dcat::PortalIdentity& portal, dcat::Profile profile,
                           dcat::Format format);

}  // namespace lodbridge::catalog
