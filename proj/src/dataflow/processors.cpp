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

#include <regex>
#include <set>

#include "internal.hpp"
#include "lodbridge/broker/broker.hpp"
#include "lodbridge/catalog/client.hpp"
#include "lodbridge/dataflow/catalog_publisher.hpp"
#include "lodbridge/dataflow/transform.hpp"
#include "lodbridge/entity/representation.hpp"
#include "lodbridge/historian/historian.hpp"

namespace lodbridge::dataflow {

namespace {

const std::set<std::string>& source_kinds() {
  static const std::set<std::string> kinds{"http-poll", "http-listen", "device-gateway"};
  return kinds;
}

const std::set<std::string>& sink_kinds() {
  static const std::set<std::string> kinds{"transform",      "route",          "to-broker",
                                           "ngsi-to-catalog", "update-catalog-metadata", "persist-historical"};
  return kinds;
}

class TransformProcessor final : public Processor {
 public:
  TransformProcessor(const Json& params, const std::filesystem::path& base_dir)
      : spec_(params.contains("spec") ? TransformSpec::load(detail::resolve(base_dir, detail::require_string(params, "spec")).string())
              : params.contains("rules") ? TransformSpec::from_json(params)
                                         : throw Error(Errc::validation, "transform needs 'spec' or 'rules'")) {}

  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    FlowRecord out = in;
    out.payload = dump_compact(apply_transform(parse_json(in.payload), spec_));
    out.attributes["content-type"] = "application/json";
    ctx.emit(std::move(out));
  }

 private:
  TransformSpec spec_;
};

class RouteProcessor final : public Processor {
 public:
  explicit RouteProcessor(const Json& params) {
    if (!params.contains("routes") || !params.at("routes").is_array() || params.at("routes").empty()) {
      throw Error(Errc::validation, "route needs a non-empty 'routes' list");
    }
    for (const auto& r : params.at("routes")) {
      Rule rule;
      rule.name = detail::require_string(r, "name");
      if (r.contains("attribute")) rule.attribute = detail::require_string(r, "attribute");
      else rule.path = detail::require_string(r, "path");
      if (r.contains("equals")) rule.equals = r.at("equals").is_string() ? r.at("equals").get<std::string>()
                                                                          : dump_compact(r.at("equals"));
      if (r.contains("regex")) {
        try {
          rule.regex = std::regex(detail::require_string(r, "regex"));
        } catch (const std::regex_error& e) {
          throw Error(Errc::validation, std::string("bad route regex: ") + e.what());
        }
      }
      rules_.push_back(std::move(rule));
    }
  }

  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    std::optional<Json> doc;
    for (const auto& rule : rules_) {
      std::optional<std::string> value;
      if (rule.attribute) {
        if (auto it = in.attributes.find(*rule.attribute); it != in.attributes.end()) value = it->second;
      } else {
        if (!doc) doc = parse_json(in.payload);
        if (const auto* v = find_path(*doc, *rule.path)) value = v->is_string() ? v->get<std::string>() : dump_compact(*v);
      }
      if (!value) continue;
      if (rule.equals && *value != *rule.equals) continue;
      if (rule.regex && !std::regex_search(*value, *rule.regex)) continue;
      ctx.emit(in, rule.name);
      return;
    }
    ctx.emit(in, "unmatched");
  }

 private:
  struct Rule {
    std::string name;
    std::optional<std::string> attribute;
    std::optional<std::string> path;
    std::optional<std::string> equals;
    std::optional<std::regex> regex;
  };
  std::vector<Rule> rules_;
};

broker::BrokerApi& broker_for(std::unique_ptr<broker::BrokerApi>& own, ProcessorContext& ctx) {
  if (own) return *own;
  if (ctx.services().broker == nullptr) throw Error(Errc::unavailable, "no broker configured");
  return *ctx.services().broker;
}

catalog::CatalogApi& catalog_for(std::unique_ptr<catalog::CatalogApi>& own, ProcessorContext& ctx) {
  if (own) return *own;
  if (ctx.services().catalog == nullptr) throw Error(Errc::unavailable, "no catalog configured");
  return *ctx.services().catalog;
}

/// Upserts each entity document. observedAtFrom names a Property whose
/// timestamp value stamps observedAt on the other attributes.
class ToBrokerProcessor final : public Processor {
 public:
  explicit ToBrokerProcessor(const Json& params) {
    if (params.contains("brokerUrl")) own_ = std::make_unique<broker::HttpBrokerClient>(detail::require_string(params, "brokerUrl"));
    if (params.contains("observedAtFrom")) observed_at_from_ = detail::require_string(params, "observedAtFrom");
  }

  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    auto& broker = broker_for(own_, ctx);
    FlowRecord out = in;
    std::size_t created = 0;
    for (const auto& doc : entity_documents(parse_json(in.payload))) {
      const auto* templates = ctx.services().templates;
      const auto* model = templates ? templates->find(doc.value("type", "")) : nullptr;
      auto e = entity::from_document(doc, model);
      if (observed_at_from_) stamp(e);
      if (broker.upsert(e)) ++created;
      out.attributes["ngsi.entityId"] = e.id().str();
      out.attributes["ngsi.entityType"] = e.type();
    }
    out.attributes["broker.created"] = std::to_string(created);
    ctx.emit(std::move(out));
  }

 private:
  void stamp(entity::Entity& e) const {
    const auto* source = e.find(*observed_at_from_);
    if (source == nullptr || !source->value.is_string()) {
      throw Error(Errc::malformed, "entity lacks timestamp property '" + *observed_at_from_ + "'");
    }
    const auto t = parse_timestamp(source->value.get<std::string>());
    auto attrs = e.attributes();
    for (auto& a : attrs) {
      if (a.name == *observed_at_from_) continue;
      a.observed_at = t;
      e.set(std::move(a));
    }
  }

  std::unique_ptr<broker::BrokerApi> own_;
  std::optional<std::string> observed_at_from_;
};

class PersistHistoricalProcessor final : public Processor {
 public:
  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    auto* historian = ctx.services().historian;
    if (historian == nullptr) throw Error(Errc::unavailable, "no historian configured");
    Json body = parse_json(in.payload);
    if (!(body.is_object() && body.contains("data"))) {
      body = Json{{"notifiedAt", format_utc(ctx.services().clock->now())}, {"data", entity_documents(body)}};
    }
    const auto appended = historian->on_notification(body);
    FlowRecord out = in;
    out.attributes["historian.appended"] = std::to_string(appended.size());
    ctx.emit(std::move(out));
  }
};

/// Writes the generated metadata into the `catalog.metadata` attribute.
class UpdateCatalogMetadataProcessor final : public Processor {
 public:
  explicit UpdateCatalogMetadataProcessor(const Json& params) : params_(MetadataParams::from_json(params)) {}

  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    const auto docs = entity_documents(parse_json(in.payload));
    if (docs.empty()) throw Error(Errc::malformed, "no entity to describe");
    const auto meta = generate_catalog_metadata(entity::from_document(docs.front()), params_, *ctx.services().clock);
    FlowRecord out = in;
    out.attributes["catalog.metadata"] = dump_compact(meta.to_json());
    ctx.emit(std::move(out));
  }

 private:
  MetadataParams params_;
};

class NgsiToCatalogProcessor final : public Processor {
 public:
  explicit NgsiToCatalogProcessor(const Json& params) : params_(PublicationParams::from_json(params)) {
    if (params.contains("catalogUrl")) {
      own_ = std::make_unique<catalog::HttpCatalogClient>(detail::require_string(params, "catalogUrl"));
    }
  }

  void process(const FlowRecord& in, ProcessorContext& ctx) override {
    std::optional<DatasetMetadata> meta;
    if (auto it = in.attributes.find("catalog.metadata"); it != in.attributes.end()) {
      meta = DatasetMetadata::from_json(parse_json(it->second));
    }
    const auto result = publish_dataset_to_catalog(parse_json(in.payload), params_, catalog_for(own_, ctx), meta);
    FlowRecord out = in;
    out.attributes["catalog.resources"] = dump_compact(Json(result.resources));
    ctx.emit(std::move(out));
  }

 private:
  PublicationParams params_;
  std::unique_ptr<catalog::CatalogApi> own_;
};

}  // namespace

bool is_source_kind(const std::string& kind) { return source_kinds().count(kind) > 0; }

bool is_known_kind(const std::string& kind) { return is_source_kind(kind) || sink_kinds().count(kind) > 0; }

std::unique_ptr<Processor> make_processor(const ProcessorConfig& config, const std::filesystem::path& base_dir) {
  const auto& k = config.kind;
  const auto& p = config.params;
  try {
    if (!p.is_object()) throw Error(Errc::validation, "params must be an object");
    if (k == "http-poll") return detail::make_http_poll(p);
    if (k == "http-listen") return detail::make_http_listen(p);
    if (k == "device-gateway") return detail::make_device_gateway(p, base_dir);
    if (k == "transform") return std::make_unique<TransformProcessor>(p, base_dir);
    if (k == "route") return std::make_unique<RouteProcessor>(p);
    if (k == "to-broker") return std::make_unique<ToBrokerProcessor>(p);
    if (k == "persist-historical") return std::make_unique<PersistHistoricalProcessor>();
    if (k == "update-catalog-metadata") return std::make_unique<UpdateCatalogMetadataProcessor>(p);
    if (k == "ngsi-to-catalog") return std::make_unique<NgsiToCatalogProcessor>(p);
  } catch (const Error& e) {
    throw Error(Errc::validation, "processor '" + config.name + "' (" + k + "): " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, "processor '" + config.name + "' (" + k + "): " + e.what());
  }
  throw Error(Errc::validation, "processor '" + config.name + "': unknown kind '" + k + "'");
}

}  // namespace lodbridge::dataflow
