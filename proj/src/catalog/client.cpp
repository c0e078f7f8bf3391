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

#include "lodbridge/catalog/client.hpp"

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::catalog {

std::optional<Organization> LocalCatalogClient::find_organization(const std::string& id) {
  return catalog_.find_organization(id);
}

void LocalCatalogClient::create_organization(const Organization& org) { catalog_.create_organization(org); }

std::optional<DatasetRecord> LocalCatalogClient::find_dataset(const std::string& id) {
  return catalog_.find_dataset(id);
}

void LocalCatalogClient::create_dataset(const DatasetRecord& ds) { catalog_.create_dataset(ds); }

void LocalCatalogClient::update_dataset(const DatasetRecord& ds) { catalog_.update_dataset(ds); }

void LocalCatalogClient::upsert_resource(const std::string& dataset_id, const Resource& res) {
  catalog_.upsert_resource(dataset_id, res);
}

namespace {

Errc code_for_status(int status) {
  switch (status) {
    case 404: return Errc::not_found;
    case 409: return Errc::conflict;
    default: return status >= 500 ? Errc::unavailable : Errc::validation;
  }
}

Json unwrap(const http::Response& res, const std::string& action) {
  if (res.status == 0) throw Error(Errc::unavailable, "catalog unreachable during " + action);
  Json body;
  try {
    body = parse_json(res.body);
  } catch (const Error&) {
    throw Error(code_for_status(res.status), action + " returned HTTP " + std::to_string(res.status));
  }
  if (!res.ok() || !body.value("success", false)) {
    std::string message = action + " failed";
    if (body.contains("error") && body["error"].contains("message")) {
      message = body["error"]["message"].get<std::string>();
    }
    throw Error(code_for_status(res.status), message);
  }
  return body["result"];
}

}  // namespace

Json HttpCatalogClient::call_get(const std::string& action, const std::string& query) {
  return unwrap(http::get(base_ + "/api/3/action/" + action + "?" + query), action);
}

Json HttpCatalogClient::call_post(const std::string& action, const Json& body) {
  return unwrap(http::post(base_ + "/api/3/action/" + action, dump_compact(body)), action);
}

std::optional<Organization> HttpCatalogClient::find_organization(const std::string& id) {
  try {
    return organization_from_json(call_get("organization_show", "id=" + text::url_encode(id)));
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) return std::nullopt;
    throw;
  }
}

void HttpCatalogClient::create_organization(const Organization& org) {
  call_post("organization_create", to_json(org));
}

std::optional<DatasetRecord> HttpCatalogClient::find_dataset(const std::string& id) {
  try {
    return dataset_from_json(call_get("package_show", "id=" + text::url_encode(id)));
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) return std::nullopt;
    throw;
  }
}

void HttpCatalogClient::create_dataset(const DatasetRecord& ds) { call_post("package_create", to_json(ds)); }

void HttpCatalogClient::update_dataset(const DatasetRecord& ds) { call_post("package_update", to_json(ds)); }

void HttpCatalogClient::upsert_resource(const std::string& dataset_id, const Resource& res) {
  auto body = to_json(res);
  body["package_id"] = dataset_id;
  call_post("resource_create", body);
}

}  // namespace lodbridge::catalog
