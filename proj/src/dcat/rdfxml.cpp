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

#include <cctype>
#include <map>

#include "lodbridge/common/error.hpp"
#include "lodbridge/dcat/graph.hpp"
#include "names.hpp"
#include "xml.hpp"

namespace lodbridge::dcat {

namespace {

bool ncname_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool ncname_char(char c) {
  return ncname_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

bool valid_ncname(std::string_view s) {
  if (s.empty() || !ncname_start(s.front())) return false;
  for (char c : s) {
    if (!ncname_char(c)) return false;
  }
  return true;
}

class RdfXmlWriter {
 public:
  explicit RdfXmlWriter(const Graph& g) : g_(g), prefixes_(prologue_namespaces(g)) {}

  std::string run() {
    // The body is rendered first so generated prefixes reach the root element.
    std::string body;
    const auto& triples = g_.triples();
    std::vector<Triple> group;
    for (auto it = triples.begin(); it != triples.end(); ++it) {
      group.push_back(*it);
      auto next = std::next(it);
      if (next == triples.end() || next->subject != it->subject) {
        body += node(group);
        group.clear();
      }
    }
    std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<rdf:RDF";
    for (const auto& [prefix, iri] : prefixes_) {
      out += "\n  xmlns:" + prefix + "=\"" + xml::escape_attr(iri) + "\"";
    }
    out += ">\n" + body + "</rdf:RDF>\n";
    return out;
  }

 private:
  std::optional<std::string> known_qname(const std::string& iri) const {
    std::optional<std::string> best;
    std::size_t best_len = 0;
    for (const auto& [prefix, base] : prefixes_) {
      if (iri.size() > base.size() && iri.compare(0, base.size(), base) == 0 &&
          valid_ncname(std::string_view(iri).substr(base.size())) && base.size() > best_len) {
        best = prefix + ":" + iri.substr(base.size());
        best_len = base.size();
      }
    }
    return best;
  }

  std::string qname(const std::string& iri) {
    if (auto q = known_qname(iri)) return *q;
    std::size_t cut = iri.size();
    while (cut > 0 && ncname_char(iri[cut - 1])) --cut;
    while (cut < iri.size() && !ncname_start(iri[cut])) ++cut;
    if (cut == 0 || cut >= iri.size()) {
      throw Error(Errc::unsupported, "IRI <" + iri + "> cannot be written as an XML qualified name");
    }
    const auto base = iri.substr(0, cut);
    std::string prefix;
    do {
      prefix = "ns" + std::to_string(++generated_);
    } while (prefixes_.count(prefix));
    prefixes_[prefix] = base;
    return prefix + ":" + iri.substr(cut);
  }

  std::string blank(const std::string& label) {
    auto [it, inserted] = blanks_.emplace(label, "b" + std::to_string(blanks_.size()));
    return it->second;
  }

  std::string node(const std::vector<Triple>& triples) {
    const auto& subject = triples.front().subject;
    const Term type_pred = Term::iri(std::string(ns::rdf) + "type");
    const Triple* typed = nullptr;
    for (const auto& t : triples) {
      if (t.predicate == type_pred && t.object.is_iri() && known_qname(t.object.value)) {
        typed = &t;
        break;
      }
    }
    const std::string element = typed ? *known_qname(typed->object.value) : "rdf:Description";
    std::string out = "  <" + element;
    if (subject.is_iri()) out += " rdf:about=\"" + xml::escape_attr(subject.value) + "\"";
    else out += " rdf:nodeID=\"" + blank(subject.value) + "\"";
    out += ">\n";
    for (const auto& t : triples) {
      if (&t == typed) continue;
      const auto p = qname(t.predicate.value);
      out += "    <" + p;
      switch (t.object.kind) {
        case TermKind::iri:
          out += " rdf:resource=\"" + xml::escape_attr(t.object.value) + "\"/>\n";
          break;
        case TermKind::blank:
          out += " rdf:nodeID=\"" + blank(t.object.value) + "\"/>\n";
          break;
        case TermKind::literal:
          if (!t.object.lang.empty()) out += " xml:lang=\"" + xml::escape_attr(t.object.lang) + "\"";
          if (!t.object.datatype.empty()) {
            out += " rdf:datatype=\"" + xml::escape_attr(t.object.datatype) + "\"";
          }
          out += ">" + xml::escape_text(t.object.value) + "</" + p + ">\n";
          break;
      }
    }
    out += "  </" + element + ">\n";
    return out;
  }

  const Graph& g_;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, std::string> blanks_;
  std::size_t generated_ = 0;
};

const std::string kRdf(ns::rdf);
constexpr std::string_view kXml = "http://www.w3.org/XML/1998/namespace";

class RdfXmlReader {
 public:
  Graph run(std::string_view text) {
    auto root = xml::parse(text);
    if (!root) return std::move(g_);
    if (root->ns == kRdf && root->local == "RDF") {
      if (root->has_text) fail(*root, "unexpected text in rdf:RDF");
      const auto lang = lang_of(*root, "");
      for (const auto& child : root->children) node_element(*child, lang);
    } else {
      node_element(*root, "");
    }
    return std::move(g_);
  }

 private:
  [[noreturn]] static void fail(const xml::Element& el, const std::string& msg) {
    throw SyntaxError(msg, el.line, el.column);
  }

  static std::string lang_of(const xml::Element& el, const std::string& inherited) {
    if (const auto* a = el.attr(kXml, "lang")) return a->value;
    return inherited;
  }

  Term blank_for(const std::string& id) {
    auto [it, inserted] = labels_.emplace(id, "");
    if (inserted) it->second = fresh();
    return Term::blank(it->second);
  }

  std::string fresh() { return "b" + std::to_string(next_blank_++); }

  Term node_element(const xml::Element& el, const std::string& inherited_lang) {
    if (el.ns.empty()) fail(el, "element <" + el.qname + "> has no namespace");
    if (el.ns == kRdf && el.local != "Description") {
      fail(el, "unsupported construct: rdf:" + el.local + " as node element");
    }
    const auto lang = lang_of(el, inherited_lang);
    Term subject;
    if (const auto* about = el.attr(kRdf, "about")) {
      subject = Term::iri(about->value);
    } else if (const auto* id = el.attr(kRdf, "nodeID")) {
      subject = blank_for(id->value);
    } else if (el.attr(kRdf, "ID") != nullptr) {
      fail(el, "unsupported construct: rdf:ID");
    } else {
      subject = Term::blank(fresh());
    }
    if (!(el.ns == kRdf && el.local == "Description")) {
      g_.add(subject, Term::iri(kRdf + "type"), Term::iri(el.ns + el.local));
    }
    for (const auto& a : el.attrs) {
      if (a.ns == kXml) continue;
      if (a.ns == kRdf) {
        if (a.local == "about" || a.local == "nodeID") continue;
        if (a.local == "type") {
          g_.add(subject, Term::iri(kRdf + "type"), Term::iri(a.value));
          continue;
        }
        fail(el, "unsupported attribute rdf:" + a.local);
      }
      if (a.ns.empty()) fail(el, "unqualified attribute '" + a.qname + "'");
      g_.add(subject, Term::iri(a.ns + a.local), Term::literal(a.value, {}, lang));
    }
    if (el.has_text) fail(el, "unexpected text in node element <" + el.qname + ">");
    for (const auto& child : el.children) property_element(subject, *child, lang);
    return subject;
  }

  void property_element(const Term& subject, const xml::Element& el, const std::string& inherited_lang) {
    if (el.ns.empty()) fail(el, "element <" + el.qname + "> has no namespace");
    if (el.ns == kRdf && (el.local == "li" || el.local == "Description" || el.local == "RDF")) {
      fail(el, "unsupported construct: rdf:" + el.local + " as property element");
    }
    const Term predicate = Term::iri(el.ns + el.local);
    const auto lang = lang_of(el, inherited_lang);
    const xml::Attr* resource = nullptr;
    const xml::Attr* node_id = nullptr;
    const xml::Attr* datatype = nullptr;
    for (const auto& a : el.attrs) {
      if (a.ns == kXml) continue;
      if (a.ns == kRdf && a.local == "resource") resource = &a;
      else if (a.ns == kRdf && a.local == "nodeID") node_id = &a;
      else if (a.ns == kRdf && a.local == "datatype") datatype = &a;
      else if (a.ns == kRdf && a.local == "parseType") fail(el, "unsupported construct: rdf:parseType");
      else fail(el, "unsupported attribute '" + a.qname + "' on property element");
    }
    if (resource || node_id) {
      if (resource && node_id) fail(el, "rdf:resource and rdf:nodeID together");
      if (el.has_text || !el.children.empty()) fail(el, "property element with rdf:resource must be empty");
      g_.add(subject, predicate, resource ? Term::iri(resource->value) : blank_for(node_id->value));
      return;
    }
    if (!el.children.empty()) {
      if (el.children.size() > 1) fail(el, "property element holds more than one node");
      if (el.has_text) fail(el, "mixed content in property element");
      if (datatype) fail(el, "rdf:datatype on a resource-valued property");
      const auto object = node_element(*el.children.front(), lang);
      g_.add(subject, predicate, object);
      return;
    }
    if (datatype) g_.add(subject, predicate, Term::literal(el.text, datatype->value));
    else g_.add(subject, predicate, Term::literal(el.text, {}, lang));
  }

  Graph g_;
  std::map<std::string, std::string> labels_;
  std::size_t next_blank_ = 0;
};

}  // namespace

std::string serialize_rdfxml(const Graph& graph) { return RdfXmlWriter(graph).run(); }

Graph parse_rdfxml(std::string_view text) { return RdfXmlReader().run(text); }

}  // namespace lodbridge::dcat
