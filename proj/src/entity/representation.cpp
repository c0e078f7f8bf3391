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

#include "lodbridge/entity/representation.hpp"

#include "lodbridge/common/error.hpp"

namespace lodbridge::entity {

namespace {

std::vector<std::string> read_context(const Json& doc) {
  std::vector<std::string> context;
  auto it = doc.find("@context");
  if (it == doc.end()) return context;
  if (it->is_string()) {
    context.push_back(it->get<std::string>());
  } else if (it->is_array()) {
    for (const auto& item : *it) {
      if (!item.is_string()) throw Error(Errc::malformed, "@context entries must be strings");
      context.push_back(item.get<std::string>());
    }
  } else {
    throw Error(Errc::malformed, "@context must be a string or list");
  }
  return context;
}

Entity make_shell(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::malformed, "entity document must be an object");
  auto id = doc.find("id");
  if (id == doc.end() || !id->is_string()) throw Error(Errc::malformed, "entity document has no id");
  auto type = doc.find("type");
  if (type == doc.end() || !type->is_string()) {
    throw Error(Errc::malformed, "entity document has no type");
  }
  return Entity(EntityId(id->get<std::string>()), type->get<std::string>(), read_context(doc));
}

bool is_reserved_member(const std::string& key) {
  return key == "id" || key == "type" || key == "@context";
}

bool looks_normalized(const Json& value) {
  if (!value.is_object()) return false;
  auto type = value.find("type");
  return type != value.end() && type->is_string() &&
         attribute_kind_from_string(type->get<std::string>()).has_value();
}

Attribute attribute_from_key_value(const std::string& name, const Json& value,
                                   const DataModelTemplate* model) {
  const AttributeSchema* schema = model ? model->find(name) : nullptr;
  Attribute attribute;
  attribute.name = name;
  attribute.value = normalize_numbers(value);
  if (schema != nullptr) {
    attribute.kind = schema->kind;
    if (schema->kind != AttributeKind::relationship) attribute.unit_code = schema->unit_code;
  }
  return attribute;
}

Attribute attribute_from_normalized(const std::string& name, const Json& node) {
  Attribute attribute;
  attribute.name = name;
  attribute.kind = *attribute_kind_from_string(node["type"].get<std::string>());
  if (attribute.kind == AttributeKind::relationship) {
    auto object = node.find("object");
    if (object == node.end()) throw Error(Errc::malformed, "relationship " + name + " has no object");
    attribute.value = *object;
  } else {
    auto value = node.find("value");
    if (value == node.end()) throw Error(Errc::malformed, "attribute " + name + " has no value");
    attribute.value = normalize_numbers(*value);
  }
  if (auto unit = node.find("unitCode"); unit != node.end()) {
    attribute.unit_code = unit->get<std::string>();
  }
  if (auto observed = node.find("observedAt"); observed != node.end()) {
    if (!observed->is_string()) throw Error(Errc::malformed, "observedAt must be a string");
    attribute.observed_at = parse_timestamp(observed->get<std::string>());
  }
  return attribute;
}

Json context_json(const Entity& entity) {
  Json context = Json::array();
  for (const auto& c : entity.context()) context.push_back(c);
  return context;
}

}  // namespace

Json to_key_values(const Entity& entity) {
  Json doc = Json::object();
  doc["id"] = entity.id().str();
  doc["type"] = entity.type();
  for (const auto& attribute : entity.attributes()) {
    doc[attribute.name] = normalize_numbers(attribute.value);
  }
  doc["@context"] = context_json(entity);
  return doc;
}

Entity from_key_values(const Json& doc, const DataModelTemplate* model) {
  Entity entity = make_shell(doc);
  for (const auto& [key, value] : doc.items()) {
    if (is_reserved_member(key)) continue;
    entity.set(attribute_from_key_value(key, value, model));
  }
  return entity;
}

Json to_normalized(const Entity& entity) {
  Json doc = Json::object();
  doc["id"] = entity.id().str();
  doc["type"] = entity.type();
  for (const auto& attribute : entity.attributes()) {
    Json node = Json::object();
    node["type"] = std::string(to_string(attribute.kind));
    if (attribute.kind == AttributeKind::relationship) {
      node["object"] = attribute.value;
    } else {
      node["value"] = normalize_numbers(attribute.value);
    }
    if (attribute.unit_code) node["unitCode"] = *attribute.unit_code;
    if (attribute.observed_at) node["observedAt"] = format_utc(*attribute.observed_at);
    doc[attribute.name] = std::move(node);
  }
  doc["@context"] = context_json(entity);
  return doc;
}

Entity from_normalized(const Json& doc) {
  Entity entity = make_shell(doc);
  for (const auto& [key, value] : doc.items()) {
    if (is_reserved_member(key)) continue;
    if (!looks_normalized(value)) {
      throw Error(Errc::malformed, "attribute " + key + " is not in normalized form");
    }
    entity.set(attribute_from_normalized(key, value));
  }
  return entity;
}

Entity from_document(const Json& doc, const DataModelTemplate* model) {
  Entity entity = make_shell(doc);
  for (const auto& [key, value] : doc.items()) {
    if (is_reserved_member(key)) continue;
    entity.set(looks_normalized(value) ? attribute_from_normalized(key, value)
                                       : attribute_from_key_value(key, value, model));
  }
  return entity;
}

Json to_document(const Entity& entity, Representation representation) {
  return representation == Representation::key_values ? to_key_values(entity)
                                                      : to_normalized(entity);
}

Fragment fragment_from_document(const Json& doc, const Entity* target,
                                const DataModelTemplate* model) {
  if (!doc.is_object()) throw Error(Errc::malformed, "attribute fragment must be an object");
  Fragment fragment;
  for (const auto& [key, value] : doc.items()) {
    if (key == "@context") continue;
    if (key == "id" || key == "type") {
      const std::string current = target == nullptr ? std::string()
                                  : key == "id"     ? target->id().str()
                                                    : target->type();
      if (target == nullptr || !value.is_string() || value.get<std::string>() != current) {
        throw Error(Errc::immutable_field, "'" + key + "' cannot be changed");
      }
      continue;
    }
    Attribute attribute = looks_normalized(value) ? attribute_from_normalized(key, value)
                                                  : attribute_from_key_value(key, value, model);
    attribute.check();
    fragment.push_back(std::move(attribute));
  }
  return fragment;
}

}  // namespace lodbridge::entity
