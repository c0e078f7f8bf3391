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

#include "lodbridge/dcat/shapes.hpp"

#include <algorithm>

#include "lodbridge/common/error.hpp"

namespace lodbridge::dcat {

namespace {

constexpr std::string_view kSh = "http://www.w3.org/ns/shacl#";

Term sh(std::string_view local) { return Term::iri(std::string(kSh) + std::string(local)); }

std::optional<std::size_t> count_value(const Graph& g, const Term& node, std::string_view local) {
  const auto values = g.objects(node, sh(local));
  if (values.empty()) return std::nullopt;
  try {
    const long n = std::stol(values.front().value);
    if (n < 0) throw Error(Errc::validation, "negative sh:" + std::string(local));
    return static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw Error(Errc::validation, "sh:" + std::string(local) + " is not an integer");
  }
}

bool kind_matches(const Term& value, NodeKind kind) {
  switch (kind) {
    case NodeKind::iri: return value.is_iri();
    case NodeKind::literal: return value.is_literal();
    case NodeKind::blank_node_or_iri: return !value.is_literal();
  }
  return false;
}

}  // namespace

void ShapeSet::check() const {
  for (const auto& shape : shapes) {
    for (const auto& p : shape.properties) {
      if (p.max_count && *p.max_count < p.min_count) {
        throw Error(Errc::validation, "shape " + shape.name + ": maxCount below minCount on " + p.path);
      }
    }
  }
}

ShapeSet ShapeSet::from_graph(const Graph& shacl) {
  ShapeSet set;
  const auto type = Term::iri(std::string(ns::rdf) + "type");
  for (const auto& node : shacl.subjects(type, sh("NodeShape"))) {
    Shape shape;
    shape.name = node.is_iri() ? node.value : "_:" + node.value;
    const auto targets = shacl.objects(node, sh("targetClass"));
    if (targets.empty()) continue;
    shape.target_class = targets.front().value;
    for (const auto& prop : shacl.objects(node, sh("property"))) {
      const auto paths = shacl.objects(prop, sh("path"));
      if (paths.empty() || !paths.front().is_iri()) continue;
      PropertyConstraint c;
      c.path = paths.front().value;
      c.min_count = count_value(shacl, prop, "minCount").value_or(0);
      c.max_count = count_value(shacl, prop, "maxCount");
      if (const auto kinds = shacl.objects(prop, sh("nodeKind")); !kinds.empty()) {
        const auto& k = kinds.front().value;
        if (k == std::string(kSh) + "IRI") c.node_kind = NodeKind::iri;
        else if (k == std::string(kSh) + "Literal") c.node_kind = NodeKind::literal;
        else if (k == std::string(kSh) + "BlankNodeOrIRI") c.node_kind = NodeKind::blank_node_or_iri;
      }
      if (const auto dts = shacl.objects(prop, sh("datatype")); !dts.empty()) c.datatype = dts.front().value;
      shape.properties.push_back(std::move(c));
    }
    std::sort(shape.properties.begin(), shape.properties.end(),
              [](const auto& a, const auto& b) { return a.path < b.path; });
    set.shapes.push_back(std::move(shape));
  }
  std::sort(set.shapes.begin(), set.shapes.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  set.check();
  return set;
}

ShapeSet ShapeSet::load(const std::string& turtle_path) {
  return from_graph(parse_turtle(read_text_file(turtle_path)));
}

const ShapeSet& ShapeSet::bundled() {
  static const ShapeSet set = load(std::string(LODBRIDGE_DATA_DIR) + "/dcat-ap-shapes.ttl");
  return set;
}

std::size_t ConformanceReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; }));
}

Json ConformanceReport::to_json() const {
  Json rows = Json::array();
  for (const auto& r : results) {
    rows.push_back(Json{{"focus", r.focus.to_ntriples()},
                        {"shape", r.shape},
                        {"path", r.path},
                        {"component", r.component},
                        {"passed", r.passed},
                        {"valueCount", r.value_count},
                        {"violatingValues", r.violating_values}});
  }
  return Json{{"conforms", conforms()}, {"failures", failures()}, {"results", rows}};
}

ConformanceReport validate_shapes(const Graph& g, const ShapeSet& shapes, const std::optional<Term>& focus) {
  ConformanceReport report;
  const auto type = Term::iri(std::string(ns::rdf) + "type");
  for (const auto& shape : shapes.shapes) {
    auto nodes = g.subjects(type, Term::iri(shape.target_class));
    if (focus) {
      nodes.erase(std::remove_if(nodes.begin(), nodes.end(), [&](const Term& n) { return n != *focus; }),
                  nodes.end());
    }
    for (const auto& node : nodes) {
      for (const auto& c : shape.properties) {
        const auto values = g.objects(node, Term::iri(c.path));
        auto row = [&](std::string component, bool passed, std::size_t violating) {
          report.results.push_back(
              ConstraintResult{node, shape.name, c.path, std::move(component), passed, values.size(), violating});
        };
        row("minCount", values.size() >= c.min_count, 0);
        if (c.max_count) row("maxCount", values.size() <= *c.max_count, 0);
        if (c.node_kind) {
          const auto bad = std::count_if(values.begin(), values.end(),
                                         [&](const Term& v) { return !kind_matches(v, *c.node_kind); });
          row("nodeKind", bad == 0, static_cast<std::size_t>(bad));
        }
        if (c.datatype) {
          const auto bad = std::count_if(values.begin(), values.end(), [&](const Term& v) {
            return !v.is_literal() || v.datatype != *c.datatype;
          });
          row("datatype", bad == 0, static_cast<std::size_t>(bad));
        }
      }
    }
  }
  return report;
}

}  // namespace lodbridge::dcat
