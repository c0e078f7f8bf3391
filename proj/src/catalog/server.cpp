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

#include "lodbridge/catalog/server.hpp"

#include "../common/http_util.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::catalog {

namespace {

constexpr const char* kAction = "/api/3/action/";

void send_result(httplib::Response& res, int status, const Json& result) {
  http::send_json(res, status, Json{{"success", true}, {"result", result}});
}

void send_failure(httplib::Response& res, const Error& e) {
  const auto type = e.code() == Errc::not_found ? "Not Found Error" : e.code() == Errc::conflict ? "Conflict"
                                                                                                 : "Validation Error";
  http::send_json(res, http::status_for(e.code()),
                  Json{{"success", false}, {"error", {{"__type", type}, {"message", e.what()}}}});
}

template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_failure(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_failure(res, Error(Errc::malformed, e.what()));
    }
  };
}

dcat::Profile requested_profile(const httplib::Request& req) {
  if (!req.has_param("profile")) return dcat::Profile::dcat;
  auto p = dcat::profile_from_name(req.get_param_value("profile"));
  if (!p) throw Error(Errc::invalid_argument, "unknown profile '" + req.get_param_value("profile") + "'");
  return *p;
}

const char* content_type(dcat::Format format) {
  return format == dcat::Format::turtle ? "text/turtle" : "application/rdf+xml";
}

std::map<std::string, Organization> organization_index(const Catalog& catalog) {
  std::map<std::string, Organization> out;
  for (auto& org : catalog.organizations()) out[org.id] = org;
  return out;
}

}  // namespace

std::string export_catalog(const Catalog& catalog, const dcat::PortalIdentity& portal, dcat::Profile profile,
                           dcat::Format format) {
  return dcat::serialize(dcat::catalog_to_dcat(catalog.datasets(), organization_index(catalog), portal, profile),
                         format);
}

std::string export_dataset(const Catalog& catalog, const std::string& dataset_id,
                           const dcat::PortalIdentity& portal, dcat::Profile profile, dcat::Format format) {
  const auto ds = catalog.get_dataset(dataset_id);
  const auto org = catalog.get_organization(ds.organization_id);
  return dcat::serialize(dcat::dataset_to_dcat(ds, org, profile, portal.base_url), format);
}

CatalogServer::CatalogServer(Catalog& catalog, dcat::PortalIdentity portal)
    : catalog_(catalog), portal_(std::move(portal)) {
  install_routes();
}

int CatalogServer::start(const std::string& host, int port) { return server_.start(host, port); }

void CatalogServer::stop() { server_.stop(); }

void CatalogServer::install_routes() {
  auto& r = server_.routes();
  const std::string a = kAction;

  r.Post(a + "organization_create", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto org = organization_from_json(parse_json(req.body));
    catalog_.create_organization(org);
    send_result(res, 200, to_json(catalog_.get_organization(org.id)));
  }));

  r.Get(a + "organization_show", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_result(res, 200, to_json(catalog_.get_organization(req.get_param_value("id"))));
  }));

  r.Get(a + "organization_list", guarded([this](const httplib::Request&, httplib::Response& res) {
    Json ids = Json::array();
    for (const auto& org : catalog_.organizations()) ids.push_back(org.id);
    send_result(res, 200, ids);
  }));

  r.Post(a + "package_create", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto id = catalog_.create_dataset(dataset_from_json(parse_json(req.body)));
    send_result(res, 200, to_json(catalog_.get_dataset(id)));
  }));

  r.Post(a + "package_update", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_result(res, 200, to_json(catalog_.update_dataset(dataset_from_json(parse_json(req.body)))));
  }));

  r.Get(a + "package_show", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_result(res, 200, to_json(catalog_.get_dataset(req.get_param_value("id"))));
  }));

  r.Get(a + "package_list", guarded([this](const httplib::Request&, httplib::Response& res) {
    Json ids = Json::array();
    for (const auto& ds : catalog_.datasets()) ids.push_back(ds.id);
    send_result(res, 200, ids);
  }));

  r.Get(a + "package_search", guarded([this](const httplib::Request& req, httplib::Response& res) {
    SearchQuery q;
    if (req.has_param("q") && !req.get_param_value("q").empty()) q.free_text = req.get_param_value("q");
    if (req.has_param("tags")) {
      for (auto& t : text::split(req.get_param_value("tags"), ',')) {
        if (!t.empty()) q.tags.push_back(t);
      }
    }
    if (req.has_param("organization")) q.organization = req.get_param_value("organization");
    if (req.has_param("res_format")) q.format = req.get_param_value("res_format");
    std::size_t rows = 1000;
    if (req.has_param("rows")) {
      try {
        rows = static_cast<std::size_t>(std::stoul(req.get_param_value("rows")));
      } catch (const std::exception&) {
        throw Error(Errc::invalid_argument, "rows must be a positive integer");
      }
    }
    Json results = Json::array();
    for (const auto& ds : catalog_.search(q, rows)) results.push_back(to_json(ds));
    send_result(res, 200, Json{{"count", results.size()}, {"results", results}});
  }));

  r.Post(a + "resource_create", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto body = parse_json(req.body);
    if (!body.contains("package_id") || !body["package_id"].is_string()) {
      throw Error(Errc::validation, "field 'package_id' must be a string");
    }
    const auto dataset_id = body["package_id"].get<std::string>();
    const auto id = catalog_.upsert_resource(dataset_id, resource_from_json(body));
    const auto ds = catalog_.get_dataset(dataset_id);
    send_result(res, 200, to_json(*ds.find_resource(id)));
  }));

  r.Get(R"(/catalog\.(rdf|ttl))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto format = *dcat::format_from_name(req.matches[1].str());
    res.set_content(export_catalog(catalog_, portal_, requested_profile(req), format), content_type(format));
  }));

  r.Get(R"(/dataset/([a-z0-9-]+)\.(rdf|ttl))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto format = *dcat::format_from_name(req.matches[2].str());
    res.set_content(export_dataset(catalog_, req.matches[1].str(), portal_, requested_profile(req), format),
                    content_type(format));
  }));
}

}  // namespace lodbridge::catalog
