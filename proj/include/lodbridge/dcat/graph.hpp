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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lodbridge::dcat {

namespace ns {
inline constexpr std::string_view rdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view dcat = "http://www.w3.org/ns/dcat#";
inline constexpr std::string_view dct = "http://purl.org/dc/terms/";
inline constexpr std::string_view foaf = "http://xmlns.com/foaf/0.1/";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
}  // namespace ns

/// The fixed prefix table: rdf, dcat, dct, foaf, xsd.
const std::map<std::string, std::string>& standard_namespaces();

/// "dct:title" -> full IRI using the fixed table. Anything else is returned
/// unchanged.
std::string expand(std::string_view curie);

enum class TermKind { iri, blank, literal };

struct Term {
  TermKind kind = TermKind::iri;
  std::string value;
  std::string datatype;  // literals only; empty = simple literal
  std::string lang;      // literals only; exclusive with datatype

  static Term iri(std::string value);
  static Term blank(std::string label);
  static Term literal(std::string lexical, std::string datatype = {}, std::string lang = {});

  bool is_iri() const { return kind == TermKind::iri; }
  bool is_blank() const { return kind == TermKind::blank; }
  bool is_literal() const { return kind == TermKind::literal; }

  /// N-Triples spelling; also the string used for ordering query results.
  std::string to_ntriples() const;

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Set of triples plus prefix bindings used when serializing.
class Graph {
 public:
  using const_iterator = std::set<Triple>::const_iterator;

  /// Returns false when the triple was already present. Throws
  /// Error(invalid_argument) on a literal subject, a non-IRI predicate or a
  /// literal with both datatype and language.
  bool add(Triple triple);
  bool add(Term subject, Term predicate, Term object);
  bool remove(const Triple& triple);
  bool contains(const Triple& triple) const { return triples_.count(triple) > 0; }

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }
  const std::set<Triple>& triples() const { return triples_; }

  std::vector<Term> objects(const Term& subject, const Term& predicate) const;
  std::vector<Term> subjects(const Term& predicate, const Term& object) const;
  std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                            const std::optional<Term>& o) const;

  /// Adds every triple of `other`. Blank labels are taken as-is.
  void merge(const Graph& other);

  void bind(std::string prefix, std::string iri) { namespaces_[std::move(prefix)] = std::move(iri); }
  const std::map<std::string, std::string>& namespaces() const { return namespaces_; }

 private:
  std::set<Triple> triples_;
  std::map<std::string, std::string> namespaces_;
};

/// Triple-set equality up to a bijective renaming of blank nodes.
bool isomorphic(const Graph& a, const Graph& b);

enum class Format { rdfxml, turtle };

std::optional<Format> format_from_name(std::string_view name);

/// Deterministic output: prefixes sorted by name, subjects sorted, then
/// predicates and objects sorted within each subject.
std::string serialize(const Graph& graph, Format format);

/// Blank nodes are relabeled b0, b1, ... in order of first appearance.
/// Throws SyntaxError with line and column on malformed input.
Graph parse(std::string_view text, Format format);

Graph parse_turtle(std::string_view text);
Graph parse_rdfxml(std::string_view text);
std::string serialize_turtle(const Graph& graph);
std::string serialize_rdfxml(const Graph& graph);

}  // namespace lodbridge::dcat
