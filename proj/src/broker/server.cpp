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

#include "lodbridge/broker/server.hpp"

#include <spdlog/spdlog.h>

#include "../common/http_util.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::broker {

namespace {

constexpr const char* kEntities = "/ngsi-ld/v1/entities";
constexpr const char* kSubscriptions = "/ngsi-ld/v1/subscriptions";

std::string problem_type(Errc code) {
  switch (code) {
    case Errc::not_found: return "https://uri.etsi.org/ngsi-ld/errors/ResourceNotFound";
    case Errc::conflict: return "https://uri.etsi.org/ngsi-ld/errors/AlreadyExists";
    case Errc::malformed:
    case Errc::syntax: return "https://uri.etsi.org/ngsi-ld/errors/InvalidRequest";
    default: return "https://uri.etsi.org/ngsi-ld/errors/BadRequestData";
  }
}

void send_problem(httplib::Response& res, const Error& e) {
  const int status = http::status_for(e.code());
  http::send_json(res, status,
                  Json{{"type", problem_type(e.code())},
                       {"title", std::string(to_string(e.code()))},
                       {"detail", e.what()}});
}

template <typename Fn>
auto guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_problem(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_problem(res, Error(Errc::malformed, e.what()));
    }
  };
}

Representation requested_representation(const httplib::Request& req) {
  if (req.has_param("options") && req.get_param_value("options").find("keyValues") != std::string::npos) {
    return Representation::key_values;
  }
  return Representation::normalized;
}

}  // namespace

BrokerServer::BrokerServer(Broker& broker, const entity::TemplateRegistry* templates)
    : broker_(broker), templates_(templates) {
  install_routes();
}

int BrokerServer::start(const std::string& host, int port) { return server_.start(host, port); }

void BrokerServer::stop() { server_.stop(); }

void BrokerServer::install_routes() {
  auto& routes = server_.routes();

  routes.Post(kEntities, guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json doc = parse_json(req.body);
    const std::string type = doc.value("type", "");
    const auto* model = templates_ ? templates_->find(type) : nullptr;
    const auto id = broker_.create_entity(entity::from_document(doc, model));
    res.status = 201;
    res.set_header("Location", std::string(kEntities) + "/" + text::url_encode(id.str()));
  }));

  routes.Get(std::string(kEntities) + "/([^/]+)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               const EntityId id(text::url_decode(req.matches[1].str()));
               http::send_json(res, 200, broker_.get_document(id, requested_representation(req)));
             }));

  routes.Get(kEntities, guarded([this](const httplib::Request& req, httplib::Response& res) {
    EntityQuery query;
    if (req.has_param("type")) query.type = req.get_param_value("type");
    if (req.has_param("q")) query.predicate = parse_predicate(req.get_param_value("q"));
    if (req.has_param("limit")) {
      const long limit = std::stol(req.get_param_value("limit"));
      if (limit < 1) throw Error(Errc::invalid_argument, "limit must be >= 1");
      query.limit = static_cast<std::size_t>(limit);
    }
    const auto representation = requested_representation(req);
    Json out = Json::array();
    for (const auto& e : broker_.query_entities(query)) {
      out.push_back(entity::to_document(e, representation));
    }
    http::send_json(res, 200, out);
  }));

  routes.Patch(std::string(kEntities) + "/([^/]+)/attrs",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const EntityId id(text::url_decode(req.matches[1].str()));
                 const auto current = broker_.get_entity(id);
                 const auto* model = templates_ ? templates_->find(current.type()) : nullptr;
                 const auto fragment = entity::fragment_from_document(parse_json(req.body), &current, model);
                 broker_.update_attrs(id, fragment);
                 res.status = 204;
               }));

  routes.Delete(std::string(kEntities) + "/([^/]+)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  broker_.delete_entity(EntityId(text::url_decode(req.matches[1].str())));
                  res.status = 204;
                }));

  routes.Post(kSubscriptions, guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto id = broker_.create_subscription(subscription_from_json(parse_json(req.body)));
    res.status = 201;
    res.set_header("Location", std::string(kSubscriptions) + "/" + text::url_encode(id));
  }));

  routes.Get(std::string(kSubscriptions) + "/([^/]+)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               http::send_json(res, 200,
                               to_json(broker_.get_subscription(text::url_decode(req.matches[1].str()))));
             }));

  routes.Delete(std::string(kSubscriptions) + "/([^/]+)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  broker_.delete_subscription(text::url_decode(req.matches[1].str()));
                  res.status = 204;
                }));
}

}  // namespace lodbridge::broker
