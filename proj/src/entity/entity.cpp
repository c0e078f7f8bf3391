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

#include "lodbridge/entity/entity.hpp"

#include <algorithm>

#include "lodbridge/common/error.hpp"

namespace lodbridge::entity {

namespace {

bool is_reserved(std::string_view name) {
  return name == "id" || name == "type" || name == "@context";
}

}  // namespace

EntityId::EntityId(std::string value) : value_(std::move(value)) {
  if (!is_valid(value_)) throw Error(Errc::invalid_argument, "entity id must be a URN: '" + value_ + "'");
}

bool EntityId::is_valid(std::string_view value) {
  return value.size() > 4 && value.substr(0, 4) == "urn:";
}

std::string_view to_string(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::property: return "Property";
    case AttributeKind::geo_property: return "GeoProperty";
    case AttributeKind::relationship: return "Relationship";
  }
  return "Property";
}

std::optional<AttributeKind> attribute_kind_from_string(std::string_view text) {
  if (text == "Property") return AttributeKind::property;
  if (text == "GeoProperty") return AttributeKind::geo_property;
  if (text == "Relationship") return AttributeKind::relationship;
  return std::nullopt;
}

Attribute Attribute::property(std::string name, Json value, std::optional<std::string> unit_code) {
  return Attribute{std::move(name), AttributeKind::property, normalize_numbers(std::move(value)),
                   std::move(unit_code), std::nullopt};
}

Attribute Attribute::geo_property(std::string name, Json geojson) {
  return Attribute{std::move(name), AttributeKind::geo_property, normalize_numbers(std::move(geojson)),
                   std::nullopt, std::nullopt};
}

Attribute Attribute::relationship(std::string name, const EntityId& target) {
  return Attribute{std::move(name), AttributeKind::relationship, Json(target.str()), std::nullopt,
                   std::nullopt};
}

void Attribute::check() const {
  if (name.empty()) throw Error(Errc::invalid_argument, "attribute name is empty");
  if (is_reserved(name)) throw Error(Errc::immutable_field, "'" + name + "' is not an attribute");
  if (kind == AttributeKind::relationship) {
    if (!value.is_string() || !EntityId::is_valid(value.get<std::string>())) {
      throw Error(Errc::invalid_argument, "relationship '" + name + "' needs a URN target");
    }
    if (unit_code) throw Error(Errc::invalid_argument, "relationship '" + name + "' has a unitCode");
  }
}

bool operator==(const Attribute& a, const Attribute& b) {
  return a.name == b.name && a.kind == b.kind && a.unit_code == b.unit_code &&
         a.observed_at == b.observed_at && normalize_numbers(a.value) == normalize_numbers(b.value);
}

Entity::Entity(EntityId id, std::string type, std::vector<std::string> context)
    : id_(std::move(id)), type_(std::move(type)), context_(std::move(context)) {
  if (type_.empty()) throw Error(Errc::invalid_argument, "entity type is empty");
  if (context_.empty()) context_.emplace_back(kDefaultContext);
}

const Attribute* Entity::find(std::string_view name) const {
  auto it = std::find_if(attributes_.begin(), attributes_.end(),
                         [&](const Attribute& a) { return a.name == name; });
  return it == attributes_.end() ? nullptr : &*it;
}

void Entity::set(Attribute attribute) {
  attribute.check();
  attribute.value = normalize_numbers(std::move(attribute.value));
  auto it = std::find_if(attributes_.begin(), attributes_.end(),
                         [&](const Attribute& a) { return a.name == attribute.name; });
  if (it == attributes_.end()) {
    attributes_.push_back(std::move(attribute));
  } else {
    *it = std::move(attribute);
  }
}

bool Entity::erase(std::string_view name) {
  auto it = std::find_if(attributes_.begin(), attributes_.end(),
                         [&](const Attribute& a) { return a.name == name; });
  if (it == attributes_.end()) return false;
  attributes_.erase(it);
  return true;
}

Entity merge_update(const Entity& entity, const Fragment& fragment) {
  Entity merged = entity;
  for (const auto& attribute : fragment) {
    if (is_reserved(attribute.name)) {
      throw Error(Errc::immutable_field, "cannot change '" + attribute.name + "' of " + entity.id().str());
    }
    merged.set(attribute);
  }
  return merged;
}

std::vector<std::string> changed_attributes(const Entity& entity, const Fragment& fragment) {
  std::vector<std::string> changed;
  for (const auto& attribute : fragment) {
    const Attribute* current = entity.find(attribute.name);
    if (current == nullptr || !(*current == attribute)) {
      if (std::find(changed.begin(), changed.end(), attribute.name) == changed.end()) {
        changed.push_back(attribute.name);
      }
    }
  }
  return changed;
}

}  // namespace lodbridge::entity
