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

#include "lodbridge/common/json.hpp"
#include "lodbridge/entity/entity.hpp"
#include "lodbridge/entity/templates.hpp"

namespace lodbridge::entity {

enum class Representation { normalized, key_values };

/// Simplified form: id, type, attributes as name -> value, then @context.
/// unitCode and observedAt are dropped.
Json to_key_values(const Entity& entity);

/// Inverse of to_key_values. Attributes become Properties unless the
/// template says otherwise; the template also supplies unit codes.
Entity from_key_values(const Json& doc, const DataModelTemplate* model = nullptr);

/// Normalized form with `{"type": "Property", "value": ...}` wrappers.
Json to_normalized(const Entity& entity);
Entity from_normalized(const Json& doc);

/// Accepts either representation, per attribute: a member whose value is an
/// object with `type` Property/GeoProperty/Relationship is read as
/// normalized, anything else as a key-value.
Entity from_document(const Json& doc, const DataModelTemplate* model = nullptr);

Json to_document(const Entity& entity, Representation representation);

/// Attribute map of a PATCH body. Members `id`/`type` raise
/// Error(immutable_field) unless they repeat the entity's own values.
Fragment fragment_from_document(const Json& doc, const Entity* target = nullptr,
                                const DataModelTemplate* model = nullptr);

}  // namespace lodbridge::entity
