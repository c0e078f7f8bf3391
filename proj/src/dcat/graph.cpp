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

#include "lodbridge/dcat/graph.hpp"

#include <algorithm>
#include <functional>
#include <unordered_map>

#include "lodbridge/common/error.hpp"
#include "names.hpp"

namespace lodbridge::dcat {

const std::map<std::string, std::string>& standard_namespaces() {
  static const std::map<std::string, std::string> table = {
      {"dcat", std::string(ns::dcat)},
      {"dct", std::string(ns::dct)},
      {"foaf", std::string(ns::foaf)},
      {"rdf", std::string(ns::rdf)},
      {"xsd", std::string(ns::xsd)},
  };
  return table;
}

std::string expand(std::string_view curie) {
  const auto colon = curie.find(':');
  if (colon == std::string_view::npos) return std::string(curie);
  const auto& table = standard_namespaces();
  auto it = table.find(std::string(curie.substr(0, colon)));
  if (it == table.end()) return std::string(curie);
  return it->second + std::string(curie.substr(colon + 1));
}

Term Term::iri(std::string value) { return Term{TermKind::iri, std::move(value), {}, {}}; }

Term Term::blank(std::string label) { return Term{TermKind::blank, std::move(label), {}, {}}; }

Term Term::literal(std::string lexical, std::string datatype, std::string lang) {
  return Term{TermKind::literal, std::move(lexical), std::move(datatype), std::move(lang)};
}

namespace {

std::string escape_ntriples(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string Term::to_ntriples() const {
  switch (kind) {
    case TermKind::iri: return "<" + value + ">";
    case TermKind::blank: return "_:" + value;
    case TermKind::literal: {
      std::string out = "\"" + escape_ntriples(value) + "\"";
      if (!lang.empty()) out += "@" + lang;
      if (!datatype.empty()) out += "^^<" + datatype + ">";
      return out;
    }
  }
  return value;
}

bool Graph::add(Triple triple) {
  if (triple.subject.is_literal()) throw Error(Errc::invalid_argument, "literal subject");
  if (!triple.predicate.is_iri()) throw Error(Errc::invalid_argument, "predicate must be an IRI");
  for (const Term* t : {&triple.subject, &triple.predicate, &triple.object}) {
    if (!t->is_literal() && (!t->datatype.empty() || !t->lang.empty())) {
      throw Error(Errc::invalid_argument, "only literals carry datatype or language");
    }
  }
  if (!triple.object.datatype.empty() && !triple.object.lang.empty()) {
    throw Error(Errc::invalid_argument, "literal has both datatype and language");
  }
  return triples_.insert(std::move(triple)).second;
}

bool Graph::add(Term subject, Term predicate, Term object) {
  return add(Triple{std::move(subject), std::move(predicate), std::move(object)});
}

bool Graph::remove(const Triple& triple) { return triples_.erase(triple) > 0; }

std::vector<Term> Graph::objects(const Term& subject, const Term& predicate) const {
  std::vector<Term> out;
  for (auto it = triples_.lower_bound(Triple{subject, predicate, Term{TermKind::iri, {}, {}, {}}});
       it != triples_.end() && it->subject == subject && it->predicate == predicate; ++it) {
    out.push_back(it->object);
  }
  return out;
}

std::vector<Term> Graph::subjects(const Term& predicate, const Term& object) const {
  std::vector<Term> out;
  for (const auto& t : triples_) {
    if (t.predicate == predicate && t.object == object) out.push_back(t.subject);
  }
  return out;
}

std::vector<Triple> Graph::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                 const std::optional<Term>& o) const {
  std::vector<Triple> out;
  for (const auto& t : triples_) {
    if ((!s || t.subject == *s) && (!p || t.predicate == *p) && (!o || t.object == *o)) {
      out.push_back(t);
    }
  }
  return out;
}

void Graph::merge(const Graph& other) {
  for (const auto& t : other.triples_) triples_.insert(t);
  for (const auto& [prefix, iri] : other.namespaces_) namespaces_.emplace(prefix, iri);
}

namespace {

// Blank-node isomorphism: colour refinement to partition the blank nodes,
// then a backtracking search restricted to equal colours.
class IsoMatcher {
 public:
  IsoMatcher(const Graph& a, const Graph& b) : a_(a), b_(b) {}

  bool run() {
    if (a_.size() != b_.size()) return false;
    std::vector<Triple> ground_a, ground_b;
    for (const auto& t : a_) {
      if (has_blank(t)) blank_a_.push_back(t); else ground_a.push_back(t);
    }
    for (const auto& t : b_) {
      if (has_blank(t)) blank_b_.push_back(t); else ground_b.push_back(t);
    }
    if (ground_a != ground_b || blank_a_.size() != blank_b_.size()) return false;
    if (blank_a_.empty()) return true;

    nodes_a_ = blank_nodes(blank_a_);
    nodes_b_ = blank_nodes(blank_b_);
    if (nodes_a_.size() != nodes_b_.size()) return false;
    refine();
    std::vector<std::size_t> ca, cb;
    for (const auto& n : nodes_a_) ca.push_back(color_a_[n]);
    for (const auto& n : nodes_b_) cb.push_back(color_b_[n]);
    std::sort(ca.begin(), ca.end());
    std::sort(cb.begin(), cb.end());
    if (ca != cb) return false;
    target_.insert(blank_b_.begin(), blank_b_.end());
    return search(0);
  }

 private:
  static bool has_blank(const Triple& t) { return t.subject.is_blank() || t.object.is_blank(); }

  static std::vector<std::string> blank_nodes(const std::vector<Triple>& triples) {
    std::set<std::string> nodes;
    for (const auto& t : triples) {
      if (t.subject.is_blank()) nodes.insert(t.subject.value);
      if (t.object.is_blank()) nodes.insert(t.object.value);
    }
    return {nodes.begin(), nodes.end()};
  }

  std::string term_key(const Term& t, const std::map<std::string, std::size_t>& colors) const {
    if (t.is_blank()) return "#" + std::to_string(colors.at(t.value));
    return t.to_ntriples();
  }

  std::map<std::string, std::size_t> step(const std::vector<Triple>& triples,
                                          const std::vector<std::string>& nodes,
                                          const std::map<std::string, std::size_t>& colors) {
    std::map<std::string, std::vector<std::string>> sigs;
    for (const auto& n : nodes) sigs[n].push_back("c" + std::to_string(colors.at(n)));
    for (const auto& t : triples) {
      if (t.subject.is_blank()) {
        sigs[t.subject.value].push_back("s " + t.predicate.value + " " + term_key(t.object, colors));
      }
      if (t.object.is_blank()) {
        sigs[t.object.value].push_back("o " + t.predicate.value + " " + term_key(t.subject, colors));
      }
    }
    std::map<std::string, std::size_t> out;
    for (auto& [n, sig] : sigs) {
      std::sort(sig.begin(), sig.end());
      std::string joined;
      for (const auto& s : sig) joined += s + "\n";
      auto [it, inserted] = palette_.emplace(joined, palette_.size());
      out[n] = it->second;
    }
    return out;
  }

  static std::size_t distinct(const std::map<std::string, std::size_t>& colors) {
    std::set<std::size_t> values;
    for (const auto& [n, c] : colors) values.insert(c);
    return values.size();
  }

  void refine() {
    for (const auto& n : nodes_a_) color_a_[n] = 0;
    for (const auto& n : nodes_b_) color_b_[n] = 0;
    for (std::size_t round = 0; round <= nodes_a_.size(); ++round) {
      auto next_a = step(blank_a_, nodes_a_, color_a_);
      auto next_b = step(blank_b_, nodes_b_, color_b_);
      const bool stable = distinct(next_a) == distinct(color_a_) && distinct(next_b) == distinct(color_b_);
      color_a_ = std::move(next_a);
      color_b_ = std::move(next_b);
      if (stable && round > 0) break;
    }
  }

  Term mapped(const Term& t) const {
    if (!t.is_blank()) return t;
    return Term::blank(mapping_.at(t.value));
  }

  bool consistent() const {
    for (const auto& t : blank_a_) {
      if (t.subject.is_blank() && !mapping_.count(t.subject.value)) continue;
      if (t.object.is_blank() && !mapping_.count(t.object.value)) continue;
      if (!target_.count(Triple{mapped(t.subject), t.predicate, mapped(t.object)})) return false;
    }
    return true;
  }

  bool search(std::size_t index) {
    if (index == nodes_a_.size()) return consistent();
    const auto& node = nodes_a_[index];
    for (const auto& candidate : nodes_b_) {
      if (used_.count(candidate) || color_b_[candidate] != color_a_[node]) continue;
      mapping_[node] = candidate;
      used_.insert(candidate);
      if (consistent() && search(index + 1)) return true;
      used_.erase(candidate);
      mapping_.erase(node);
    }
    return false;
  }

  const Graph& a_;
  const Graph& b_;
  std::vector<Triple> blank_a_, blank_b_;
  std::vector<std::string> nodes_a_, nodes_b_;
  std::map<std::string, std::size_t> color_a_, color_b_;
  std::map<std::string, std::size_t> palette_;
  std::map<std::string, std::string> mapping_;
  std::set<std::string> used_;
  std::set<Triple> target_;
};

}  // namespace

bool isomorphic(const Graph& a, const Graph& b) { return IsoMatcher(a, b).run(); }

std::optional<Format> format_from_name(std::string_view name) {
  if (name == "rdf" || name == "rdfxml" || name == "xml") return Format::rdfxml;
  if (name == "ttl" || name == "turtle") return Format::turtle;
  return std::nullopt;
}

std::string serialize(const Graph& graph, Format format) {
  return format == Format::turtle ? serialize_turtle(graph) : serialize_rdfxml(graph);
}

Graph parse(std::string_view text, Format format) {
  return format == Format::turtle ? parse_turtle(text) : parse_rdfxml(text);
}

}  // namespace lodbridge::dcat

namespace lodbridge::dcat {

std::map<std::string, std::string> prologue_namespaces(const Graph& g) {
  auto out = standard_namespaces();
  for (const auto& [prefix, iri] : g.namespaces()) out.emplace(prefix, iri);
  return out;
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

}  // namespace lodbridge::dcat
