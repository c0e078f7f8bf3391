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

#include "lodbridge/entity/templates.hpp"

#include <set>

#include "lodbridge/common/error.hpp"

namespace lodbridge::entity {

std::string_view to_string(ValueShape shape) {
  switch (shape) {
    case ValueShape::number: return "number";
    case ValueShape::string: return "string";
    case ValueShape::boolean: return "boolean";
    case ValueShape::geo: return "geo";
    case ValueShape::object: return "object";
    case ValueShape::relationship: return "relationship";
  }
  return "string";
}

std::optional<ValueShape> value_shape_from_string(std::string_view text) {
  for (auto shape : {ValueShape::number, ValueShape::string, ValueShape::boolean, ValueShape::geo,
                     ValueShape::object, ValueShape::relationship}) {
    if (to_string(shape) == text) return shape;
  }
  return std::nullopt;
}

std::string_view to_string(Violation violation) {
  switch (violation) {
    case Violation::missing: return "missing";
    case Violation::wrong_shape: return "wrong-shape";
    case Violation::wrong_kind: return "wrong-kind";
  }
  return "missing";
}

const AttributeSchema* DataModelTemplate::find(std::string_view name) const {
  for (const auto& schema : attributes) {
    if (schema.name == name) return &schema;
  }
  return nullptr;
}

void DataModelTemplate::check() const {
  std::set<std::string> names;
  bool any_required = false;
  for (const auto& schema : attributes) {
    if (!names.insert(schema.name).second) {
      throw Error(Errc::invalid_argument, type_name + ": duplicate attribute " + schema.name);
    }
    any_required = any_required || schema.required;
  }
  if (!any_required) throw Error(Errc::invalid_argument, type_name + ": no required attribute");
}

bool value_has_shape(const Json& value, ValueShape shape) {
  switch (shape) {
    case ValueShape::number: return value.is_number();
    case ValueShape::string: return value.is_string();
    case ValueShape::boolean: return value.is_boolean();
    case ValueShape::geo:
      return value.is_object() && value.contains("type") && value["type"].is_string() &&
             value.contains("coordinates") && value["coordinates"].is_array();
    case ValueShape::object: return value.is_object();
    case ValueShape::relationship:
      return value.is_string() && EntityId::is_valid(value.get<std::string>());
  }
  return false;
}

ValidationReport validate_entity(const Entity& entity, const DataModelTemplate& model) {
  if (model.type_name != entity.type()) {
    throw Error(Errc::type_mismatch,
                "template " + model.type_name + " does not apply to type " + entity.type());
  }
  ValidationReport report;
  for (const auto& schema : model.attributes) {
    const Attribute* attribute = entity.find(schema.name);
    if (attribute == nullptr) {
      if (schema.required) {
        report.findings.push_back({schema.name, Violation::missing, "required attribute absent"});
      }
      continue;
    }
    if (attribute->kind != schema.kind) {
      report.findings.push_back({schema.name, Violation::wrong_kind,
                                 "expected " + std::string(to_string(schema.kind)) + ", got " +
                                     std::string(to_string(attribute->kind))});
    } else if (!value_has_shape(attribute->value, schema.shape)) {
      report.findings.push_back({schema.name, Violation::wrong_shape,
                                 "expected " + std::string(to_string(schema.shape)) + " value"});
    }
  }
  return report;
}

TemplateRegistry::TemplateRegistry(std::vector<DataModelTemplate> templates) {
  for (auto& model : templates) {
    model.check();
    const auto name = model.type_name;
    if (!templates_.emplace(name, std::move(model)).second) {
      throw Error(Errc::invalid_argument, "duplicate template " + name);
    }
  }
}

const DataModelTemplate* TemplateRegistry::find(std::string_view type_name) const {
  auto it = templates_.find(type_name);
  return it == templates_.end() ? nullptr : &it->second;
}

std::vector<std::string> TemplateRegistry::types() const {
  std::vector<std::string> out;
  for (const auto& [name, model] : templates_) out.push_back(name);
  return out;
}

TemplateRegistry TemplateRegistry::from_json(const Json& doc) {
  if (!doc.contains("templates") || !doc["templates"].is_array()) {
    throw Error(Errc::malformed, "template file needs a 'templates' array");
  }
  std::vector<DataModelTemplate> templates;
  for (const auto& item : doc["templates"]) {
    DataModelTemplate model;
    model.type_name = item.at("type").get<std::string>();
    for (const auto& attr : item.at("attributes")) {
      AttributeSchema schema;
      schema.name = attr.at("name").get<std::string>();
      const auto kind = attribute_kind_from_string(attr.value("kind", "Property"));
      const auto shape = value_shape_from_string(attr.at("shape").get<std::string>());
      if (!kind || !shape) throw Error(Errc::malformed, "bad kind/shape for " + schema.name);
      schema.kind = *kind;
      schema.shape = *shape;
      schema.required = attr.value("required", false);
      if (attr.contains("unitCode")) schema.unit_code = attr["unitCode"].get<std::string>();
      model.attributes.push_back(std::move(schema));
    }
    templates.push_back(std::move(model));
  }
  return TemplateRegistry(std::move(templates));
}

TemplateRegistry TemplateRegistry::load(const std::string& path) {
  return from_json(read_json_file(path));
}

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry registry = load(std::string(LODBRIDGE_DATA_DIR) + "/templates.json");
  return registry;
}

}  // namespace lodbridge::entity
