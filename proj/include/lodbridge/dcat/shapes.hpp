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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::dcat {

enum class NodeKind { iri, literal, blank_node_or_iri };

struct PropertyConstraint {
  std::string path;
  std::size_t min_count = 0;
  std::optional<std::size_t> max_count;
  std::optional<NodeKind> node_kind;
  std::optional<std::string> datatype;
};

struct Shape {
  std::string name;
  std::string target_class;
  std::vector<PropertyConstraint> properties;
};

struct ShapeSet {
  std::vector<Shape> shapes;

  /// Throws Error(validation) when maxCount < minCount.
  void check() const;

  /// Reads sh:NodeShape nodes with sh:targetClass and sh:property blocks
  /// (sh:path, sh:minCount, sh:maxCount, sh:nodeKind, sh:datatype). Other
  /// SHACL components are ignored.
  static ShapeSet from_graph(const Graph& shacl);
  static ShapeSet load(const std::string& turtle_path);
  /// data/dcat-ap-shapes.ttl: DCAT-AP mandatory properties.
  static const ShapeSet& bundled();
};

struct ConstraintResult {
  Term focus;
  std::string shape;
  std::string path;
  std::string component;  // minCount | maxCount | nodeKind | datatype
  bool passed = true;
  std::size_t value_count = 0;
  std::size_t violating_values = 0;
};

struct ConformanceReport {
  std::vector<ConstraintResult> results;

  std::size_t failures() const;
  bool conforms() const { return failures() == 0; }
  Json to_json() const;
};

/// With `focus` set, only that node is checked (against shapes targeting a
/// class it has).
ConformanceReport validate_shapes(const Graph& g, const ShapeSet& shapes,
                                  const std::optional<Term>& focus = std::nullopt);

}  // namespace lodbridge::dcat
