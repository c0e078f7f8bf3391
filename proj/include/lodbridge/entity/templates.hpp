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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lodbridge/entity/entity.hpp"

namespace lodbridge::entity {

enum class ValueShape { number, string, boolean, geo, object, relationship };

std::string_view to_string(ValueShape shape);
std::optional<ValueShape> value_shape_from_string(std::string_view text);

struct AttributeSchema {
  std::string name;
  AttributeKind kind = AttributeKind::property;
  ValueShape shape = ValueShape::string;
  bool required = false;
  std::optional<std::string> unit_code;
};

/// Minimal Smart Data Model: the attributes a type is expected to carry.
struct DataModelTemplate {
  std::string type_name;
  std::vector<AttributeSchema> attributes;

  const AttributeSchema* find(std::string_view name) const;

  /// Unique names, at least one required attribute.
  void check() const;
};

enum class Violation { missing, wrong_shape, wrong_kind };

std::string_view to_string(Violation violation);

struct Finding {
  std::string attribute;
  Violation violation;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
};

/// Pure schema walk. Throws Error(type_mismatch) when the template is for a
/// different type.
ValidationReport validate_entity(const Entity& entity, const DataModelTemplate& model);

bool value_has_shape(const Json& value, ValueShape shape);

class TemplateRegistry {
 public:
  TemplateRegistry() = default;
  explicit TemplateRegistry(std::vector<DataModelTemplate> templates);

  const DataModelTemplate* find(std::string_view type_name) const;
  std::vector<std::string> types() const;

  static TemplateRegistry from_json(const Json& doc);
  static TemplateRegistry load(const std::string& path);

  /// The template file shipped under data/.
  static const TemplateRegistry& builtin();

 private:
  std::map<std::string, DataModelTemplate, std::less<>> templates_;
};

}  // namespace lodbridge::entity
