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

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::broker {

bool BrokerApi::upsert(const Entity& e) {
  try {
    create(e);
    return true;
  } catch (const Error& err) {
    if (err.code() != Errc::conflict) throw;
  }
  update(e.id(), e.attributes());
  return false;
}

void LocalBrokerClient::create(const Entity& e) { broker_.create_entity(e); }

std::optional<Entity> LocalBrokerClient::get(const EntityId& id) {
  try {
    return broker_.get_entity(id);
  } catch (const Error& e) {
    if (e.code() == Errc::not_found) return std::nullopt;
    throw;
  }
}

void LocalBrokerClient::update(const EntityId& id, const Fragment& fragment) {
  broker_.update_attrs(id, fragment);
}

std::vector<Entity> LocalBrokerClient::query(const EntityQuery& query) {
  return broker_.query_entities(query);
}

std::string LocalBrokerClient::subscribe(const Subscription& sub) {
  return broker_.create_subscription(sub);
}

namespace {

[[noreturn]] void raise(const http::Response& res, const std::string& what) {
  if (res.status == 0) throw Error(Errc::unavailable, what + ": broker unreachable");
  Errc code = Errc::invalid_argument;
  if (res.status == 404) code = Errc::not_found;
  if (res.status == 409) code = Errc::conflict;
  std::string detail = res.body;
  try {
    detail = Json::parse(res.body).value("detail", res.body);
  } catch (const std::exception&) {
  }
  throw Error(code, what + ": " + detail);
}

Json fragment_json(const Fragment& fragment) {
  // Normalized form keeps unitCode/observedAt across the wire.
  Json doc = Json::object();
  for (const auto& a : fragment) {
    Json node = Json::object();
    node["type"] = std::string(entity::to_string(a.kind));
    if (a.kind == entity::AttributeKind::relationship) {
      node["object"] = a.value;
    } else {
      node["value"] = a.value;
    }
    if (a.unit_code) node["unitCode"] = *a.unit_code;
    if (a.observed_at) node["observedAt"] = format_utc(*a.observed_at);
    doc[a.name] = std::move(node);
  }
  return doc;
}

}  // namespace

HttpBrokerClient::HttpBrokerClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

void HttpBrokerClient::create(const Entity& e) {
  const auto res = http::post(base_url_ + "/ngsi-ld/v1/entities", dump_compact(entity::to_normalized(e)));
  if (res.status != 201) raise(res, "create " + e.id().str());
}

std::optional<Entity> HttpBrokerClient::get(const EntityId& id) {
  const auto res = http::get(base_url_ + "/ngsi-ld/v1/entities/" + text::url_encode(id.str()));
  if (res.status == 404) return std::nullopt;
  if (res.status != 200) raise(res, "get " + id.str());
  return entity::from_normalized(parse_json(res.body));
}

void HttpBrokerClient::update(const EntityId& id, const Fragment& fragment) {
  const auto res = http::patch(base_url_ + "/ngsi-ld/v1/entities/" + text::url_encode(id.str()) + "/attrs",
                               dump_compact(fragment_json(fragment)));
  if (res.status != 204) raise(res, "update " + id.str());
}

std::vector<Entity> HttpBrokerClient::query(const EntityQuery& query) {
  std::string url = base_url_ + "/ngsi-ld/v1/entities?limit=" + std::to_string(query.limit);
  if (query.type) url += "&type=" + text::url_encode(*query.type);
  if (query.predicate) url += "&q=" + text::url_encode(query.predicate->to_string());
  const auto res = http::get(url);
  if (res.status != 200) raise(res, "query");
  std::vector<Entity> out;
  for (const auto& doc : parse_json(res.body)) out.push_back(entity::from_normalized(doc));
  return out;
}

std::string HttpBrokerClient::subscribe(const Subscription& sub) {
  const auto res = http::post(base_url_ + "/ngsi-ld/v1/subscriptions", dump_compact(to_json(sub)));
  if (res.status != 201) raise(res, "subscribe");
  const auto slash = res.location.rfind('/');
  return text::url_decode(slash == std::string::npos ? res.location : res.location.substr(slash + 1));
}

}  // namespace lodbridge::broker
