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

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::entity {

/// Context applied when a document carries no `@context`.
inline constexpr std::string_view kDefaultContext =
    "https://uri.etsi.org/ngsi-ld/v1/ngsi-ld-core-context.jsonld";

/// URN-formatted entity identifier (`urn:WeatherObserved:Santander`).
class EntityId {
 public:
  /// Throws Error(invalid_argument) unless the value starts with `urn:` and
  /// has something after it.
  explicit EntityId(std::string value);

  const std::string& str() const noexcept { return value_; }

  static bool is_valid(std::string_view value);

  friend auto operator<=>(const EntityId&, const EntityId&) = default;

 private:
  std::string value_;
};

enum class AttributeKind { property, geo_property, relationship };

std::string_view to_string(AttributeKind kind);
std::optional<AttributeKind> attribute_kind_from_string(std::string_view text);

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::property;
  /// Scalar or structured value. For relationships, the target id string.
  Json value;
  std::optional<std::string> unit_code;
  std::optional<Timestamp> observed_at;

  static Attribute property(std::string name, Json value,
                            std::optional<std::string> unit_code = std::nullopt);
  static Attribute geo_property(std::string name, Json geojson);
  static Attribute relationship(std::string name, const EntityId& target);

  /// Throws Error(invalid_argument) when kind-specific rules are broken.
  void check() const;

  friend bool operator==(const Attribute& a, const Attribute& b);
};

/// NGSI-LD entity subset. Value type: id and type are fixed at construction;
/// attributes keep insertion order and unique names.
class Entity {
 public:
  Entity(EntityId id, std::string type, std::vector<std::string> context = {});

  const EntityId& id() const noexcept { return id_; }
  const std::string& type() const noexcept { return type_; }
  const std::vector<std::string>& context() const noexcept { return context_; }
  const std::vector<Attribute>& attributes() const noexcept { return attributes_; }

  const Attribute* find(std::string_view name) const;

  /// Inserts, or replaces in place when the name already exists.
  void set(Attribute attribute);
  bool erase(std::string_view name);

  friend bool operator==(const Entity& a, const Entity& b) = default;

 private:
  EntityId id_;
  std::string type_;
  std::vector<std::string> context_;
  std::vector<Attribute> attributes_;
};

using Fragment = std::vector<Attribute>;

/// Overwrites same-named attributes, leaves the rest alone. Throws
/// Error(immutable_field) if the fragment tries to touch id, type or
/// @context.
Entity merge_update(const Entity& entity, const Fragment& fragment);

/// Names of attributes in `fragment` whose content differs from `entity`.
std::vector<std::string> changed_attributes(const Entity& entity, const Fragment& fragment);

}  // namespace lodbridge::entity
