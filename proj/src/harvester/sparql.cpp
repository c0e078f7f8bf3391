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

#include "lodbridge/harvester/sparql.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::harvester {

namespace {

const std::set<std::string> kUnsupported = {
    "OPTIONAL", "UNION", "GRAPH", "ORDER", "GROUP", "MINUS", "BIND", "VALUES", "SERVICE", "OFFSET",
    "HAVING", "CONSTRUCT", "ASK", "DESCRIBE", "FROM", "NOT", "EXISTS", "BASE", "INSERT", "DELETE"};

class QueryReader {
 public:
  explicit QueryReader(std::string_view s) : s_(s) {}

  QueryPlan run() {
    skip_ws();
    while (word_ahead("PREFIX")) prefix_decl();
    if (!word_ahead("SELECT")) unexpected("SELECT");
    take_word();
    skip_ws();
    if (word_ahead("DISTINCT")) {
      take_word();
      plan_.distinct = true;
      skip_ws();
    }
    if (peek() == '*') fail("unsupported construct: SELECT *");
    while (peek() == '?' || peek() == '$') {
      plan_.select_vars.push_back(variable());
      skip_ws();
    }
    if (plan_.select_vars.empty()) fail("expected at least one variable after SELECT");
    if (word_ahead("WHERE")) {
      take_word();
      skip_ws();
    }
    group();
    skip_ws();
    if (word_ahead("LIMIT")) {
      take_word();
      skip_ws();
      const auto start = pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (start == pos_) fail("expected a number after LIMIT");
      const auto n = std::stoull(std::string(s_.substr(start, pos_ - start)));
      plan_.limit = n;
      skip_ws();
    }
    if (!eof()) unexpected("end of query");
    validate();
    return std::move(plan_);
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }

  void advance(std::size_t n = 1) {
    for (std::size_t i = 0; i < n && pos_ < s_.size(); ++i, ++pos_) {
      if (s_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, line_, col_); }

  [[noreturn]] void unexpected(const std::string& wanted) {
    const auto w = peek_word();
    if (kUnsupported.count(text::to_upper(w))) {
      throw Error(Errc::unsupported, "unsupported construct: " + text::to_upper(w));
    }
    fail("expected " + wanted + (eof() ? ", found end of input" : ", found '" + std::string(1, peek()) + "'"));
  }

  void skip_ws() {
    while (!eof()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string peek_word() const {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[end])))) ++end;
    return std::string(s_.substr(pos_, end - pos_));
  }

  bool word_ahead(std::string_view kw) const {
    const auto w = peek_word();
    if (text::to_upper(w) != kw) return false;
    const char next = peek(w.size());
    return next != ':' && next != '_' && !std::isdigit(static_cast<unsigned char>(next));
  }

  void take_word() { advance(peek_word().size()); }

  void expect(char c) {
    if (peek() != c) unexpected(std::string("'") + c + "'");
    advance();
  }

  void prefix_decl() {
    take_word();
    skip_ws();
    const auto start = pos_;
    while (!eof() && peek() != ':' && !std::isspace(static_cast<unsigned char>(peek()))) advance();
    const auto prefix = std::string(s_.substr(start, pos_ - start));
    expect(':');
    skip_ws();
    plan_.prefixes[prefix] = iri_ref();
    skip_ws();
  }

  std::string iri_ref() {
    expect('<');
    const auto start = pos_;
    while (!eof() && peek() != '>') {
      if (std::isspace(static_cast<unsigned char>(peek()))) fail("whitespace in IRI");
      advance();
    }
    const auto out = std::string(s_.substr(start, pos_ - start));
    expect('>');
    return out;
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }

  std::string variable() {
    advance();  // ? or $
    const auto start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) advance();
    if (start == pos_) fail("empty variable name");
    return std::string(s_.substr(start, pos_ - start));
  }

  dcat::Term prefixed_name() {
    const auto line = line_;
    const auto col = col_;
    const auto start = pos_;
    while (!eof() && peek() != ':' && name_char(peek())) advance();
    const auto prefix = std::string(s_.substr(start, pos_ - start));
    if (peek() != ':') {
      if (kUnsupported.count(text::to_upper(prefix))) {
        throw Error(Errc::unsupported, "unsupported construct: " + text::to_upper(prefix));
      }
      throw SyntaxError("unexpected token '" + prefix + "'", line, col);
    }
    advance();
    const auto local_start = pos_;
    while (!eof() && name_char(peek())) advance();
    while (pos_ > local_start && s_[pos_ - 1] == '.') {
      --pos_;
      --col_;
    }
    auto it = plan_.prefixes.find(prefix);
    if (it == plan_.prefixes.end()) throw SyntaxError("undeclared prefix '" + prefix + "'", line, col);
    return dcat::Term::iri(it->second + std::string(s_.substr(local_start, pos_ - local_start)));
  }

  std::string string_literal() {
    const char q = peek();
    advance();
    std::string out;
    while (!eof() && peek() != q) {
      if (peek() == '\n') fail("newline in string literal");
      if (peek() == '\\') {
        advance();
        switch (peek()) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          default: fail("bad escape in string literal");
        }
        advance();
        continue;
      }
      out.push_back(peek());
      advance();
    }
    if (eof()) fail("unterminated string literal");
    advance();
    return out;
  }

  PatternTerm pattern_term(bool predicate_position) {
    const char c = peek();
    if (c == '?' || c == '$') return PatternTerm::var(variable());
    if (c == '<') return PatternTerm::constant(dcat::Term::iri(iri_ref()));
    if (predicate_position && c == 'a' && !name_char(peek(1)) && peek(1) != ':') {
      advance();
      return PatternTerm::constant(dcat::Term::iri(dcat::expand("rdf:type")));
    }
    if (c == '"' || c == '\'') {
      auto lexical = string_literal();
      if (peek() == '@') {
        advance();
        const auto start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) advance();
        return PatternTerm::constant(dcat::Term::literal(lexical, {}, std::string(s_.substr(start, pos_ - start))));
      }
      if (peek() == '^' && peek(1) == '^') {
        advance(2);
        const auto dt = peek() == '<' ? iri_ref() : prefixed_name().value;
        return PatternTerm::constant(dcat::Term::literal(lexical, dt));
      }
      return PatternTerm::constant(dcat::Term::literal(lexical));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || ((c == '-' || c == '+') && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      const auto start = pos_;
      advance();
      bool dot = false;
      while (std::isdigit(static_cast<unsigned char>(peek())) ||
             (!dot && peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
        if (peek() == '.') dot = true;
        advance();
      }
      return PatternTerm::constant(dcat::Term::literal(std::string(s_.substr(start, pos_ - start)),
                                                       dcat::expand(dot ? "xsd:decimal" : "xsd:integer")));
    }
    if (word_ahead("TRUE") || word_ahead("FALSE")) {
      auto w = text::to_lower(peek_word());
      take_word();
      return PatternTerm::constant(dcat::Term::literal(w, dcat::expand("xsd:boolean")));
    }
    if (c == '[' || c == '(') fail("unsupported construct: blank node syntax");
    if (c == '_' && peek(1) == ':') fail("unsupported construct: blank node label");
    if (c == '{') throw Error(Errc::unsupported, "unsupported construct: nested group");
    if (eof()) fail("unexpected end of input in pattern");
    return PatternTerm::constant(prefixed_name());
  }

  void filter() {
    take_word();
    skip_ws();
    // Both FILTER(regex(...)) and the bare built-in call FILTER regex(...).
    const bool wrapped = peek() == '(';
    if (wrapped) advance();
    skip_ws();
    const auto fn = peek_word();
    if (text::to_upper(fn) != "REGEX") {
      throw Error(Errc::unsupported, "unsupported construct: FILTER " + (fn.empty() ? std::string("expression") : fn));
    }
    take_word();
    skip_ws();
    expect('(');
    skip_ws();
    if (text::to_upper(peek_word()) != "STR") {
      throw Error(Errc::unsupported, "unsupported construct: regex argument other than str(?v)");
    }
    take_word();
    skip_ws();
    expect('(');
    skip_ws();
    if (peek() != '?' && peek() != '$') unexpected("a variable");
    RegexFilter f;
    f.variable = variable();
    skip_ws();
    expect(')');
    skip_ws();
    expect(',');
    skip_ws();
    if (peek() != '"' && peek() != '\'') unexpected("a regex string");
    f.pattern = string_literal();
    skip_ws();
    if (peek() == ',') throw Error(Errc::unsupported, "unsupported construct: regex flags");
    expect(')');
    if (wrapped) {
      skip_ws();
      expect(')');
    }
    check_regex_subset(f.pattern);
    plan_.filters.push_back(std::move(f));
  }

  void group() {
    expect('{');
    for (;;) {
      skip_ws();
      if (peek() == '}') {
        advance();
        return;
      }
      if (word_ahead("FILTER")) {
        filter();
        skip_ws();
        if (peek() == '.') advance();
        continue;
      }
      const auto w = text::to_upper(peek_word());
      if (kUnsupported.count(w) && !std::isalnum(static_cast<unsigned char>(peek(w.size()))) && peek(w.size()) != ':') {
        throw Error(Errc::unsupported, "unsupported construct: " + w);
      }
      triples_block();
      skip_ws();
      if (peek() == '.') {
        advance();
      } else if (peek() != '}' && !word_ahead("FILTER")) {
        unexpected("'.' or '}'");
      }
    }
  }

  void triples_block() {
    auto s = pattern_term(false);
    for (;;) {
      skip_ws();
      auto p = pattern_term(true);
      for (;;) {
        skip_ws();
        auto o = pattern_term(false);
        plan_.patterns.push_back(TriplePattern{s, p, o});
        skip_ws();
        if (peek() != ',') break;
        advance();
      }
      if (peek() != ';') return;
      advance();
      skip_ws();
      if (peek() == '.' || peek() == '}') return;
    }
  }

  void validate() {
    std::set<std::string> vars;
    for (const auto& tp : plan_.patterns) {
      for (const auto* t : {&tp.subject, &tp.predicate, &tp.object}) {
        if (t->is_variable()) vars.insert(t->variable);
      }
      if (!tp.subject.is_variable() && tp.subject.term.is_literal()) {
        throw Error(Errc::invalid_argument, "literal in subject position");
      }
      if (!tp.predicate.is_variable() && !tp.predicate.term.is_iri()) {
        throw Error(Errc::invalid_argument, "predicate must be an IRI or a variable");
      }
    }
    for (const auto& v : plan_.select_vars) {
      if (!vars.count(v)) throw Error(Errc::invalid_argument, "selected variable ?" + v + " is not used in WHERE");
    }
    for (const auto& f : plan_.filters) {
      if (!vars.count(f.variable)) throw Error(Errc::invalid_argument, "filtered variable ?" + f.variable + " is not bound");
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  QueryPlan plan_;
};

using Binding = std::map<std::string, dcat::Term>;

bool unify(const PatternTerm& pt, const dcat::Term& value, Binding& b, std::vector<std::string>& added) {
  if (!pt.is_variable()) return pt.term == value;
  auto it = b.find(pt.variable);
  if (it != b.end()) return it->second == value;
  b.emplace(pt.variable, value);
  added.push_back(pt.variable);
  return true;
}

void solve(const std::vector<TriplePattern>& patterns, std::size_t index, const std::vector<dcat::Triple>& triples,
           Binding& binding, std::vector<Binding>& out) {
  if (index == patterns.size()) {
    out.push_back(binding);
    return;
  }
  const auto& tp = patterns[index];
  for (const auto& t : triples) {
    std::vector<std::string> added;
    if (unify(tp.subject, t.subject, binding, added) && unify(tp.predicate, t.predicate, binding, added) &&
        unify(tp.object, t.object, binding, added)) {
      solve(patterns, index + 1, triples, binding, out);
    }
    for (const auto& v : added) binding.erase(v);
  }
}

}  // namespace

QueryPlan parse_query(std::string_view text) { return QueryReader(text).run(); }

void check_regex_subset(std::string_view pattern) {
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    const char c = pattern[i];
    if (c == '{' || c == '}') throw Error(Errc::unsupported, "unsupported regex feature: counted repetition");
    if (c == '(' && i + 1 < pattern.size() && pattern[i + 1] == '?') {
      throw Error(Errc::unsupported, "unsupported regex feature: group modifiers");
    }
    if (c == '\\') {
      if (i + 1 >= pattern.size()) throw Error(Errc::invalid_argument, "dangling backslash in regex");
      const char e = pattern[++i];
      if (std::isdigit(static_cast<unsigned char>(e)) || e == 'b' || e == 'B' || e == 'p' || e == 'P') {
        throw Error(Errc::unsupported, std::string("unsupported regex escape \\") + e);
      }
    }
  }
  try {
    std::regex probe{std::string(pattern), std::regex::ECMAScript};
  } catch (const std::regex_error& e) {
    throw Error(Errc::invalid_argument, "invalid regex '" + std::string(pattern) + "': " + e.what());
  }
}

std::string lexical_form(const dcat::Term& t) { return t.value; }

ResultTable execute_query(const QueryPlan& plan, const dcat::Graph& g) {
  const std::vector<dcat::Triple> triples(g.begin(), g.end());
  std::vector<Binding> solutions;
  Binding binding;
  solve(plan.patterns, 0, triples, binding, solutions);

  std::vector<std::pair<std::string, std::regex>> filters;
  for (const auto& f : plan.filters) filters.emplace_back(f.variable, std::regex(f.pattern, std::regex::ECMAScript));

  ResultTable table;
  table.variables = plan.select_vars;
  for (const auto& sol : solutions) {
    bool keep = true;
    for (const auto& [var, re] : filters) {
      const auto& value = sol.at(var);
      if (value.is_blank() || !std::regex_search(lexical_form(value), re)) {
        keep = false;
        break;
      }
    }
    if (!keep) continue;
    std::vector<dcat::Term> row;
    for (const auto& v : plan.select_vars) row.push_back(sol.at(v));
    table.rows.push_back(std::move(row));
  }
  auto key = [](const std::vector<dcat::Term>& row) {
    std::vector<std::string> k;
    for (const auto& t : row) k.push_back(t.to_ntriples());
    return k;
  };
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [&](const auto& a, const auto& b) { return key(a) < key(b); });
  if (plan.distinct) {
    table.rows.erase(std::unique(table.rows.begin(), table.rows.end()), table.rows.end());
  }
  if (plan.limit && table.rows.size() > *plan.limit) table.rows.resize(*plan.limit);
  return table;
}

Json ResultTable::to_json() const {
  Json bindings = Json::array();
  for (const auto& row : rows) {
    Json b = Json::object();
    for (std::size_t i = 0; i < variables.size(); ++i) {
      const auto& t = row[i];
      Json cell{{"type", t.is_iri() ? "uri" : t.is_blank() ? "bnode" : "literal"}, {"value", t.value}};
      if (!t.lang.empty()) cell["xml:lang"] = t.lang;
      if (!t.datatype.empty()) cell["datatype"] = t.datatype;
      b[variables[i]] = cell;
    }
    bindings.push_back(b);
  }
  return Json{{"head", {{"vars", variables}}}, {"results", {{"bindings", bindings}}}};
}

std::string ResultTable::to_table() const {
  std::string out;
  for (std::size_t i = 0; i < variables.size(); ++i) out += (i ? "\t?" : "?") + variables[i];
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "\t" : "") + row[i].to_ntriples();
    out += "\n";
  }
  return out;
}

}  // namespace lodbridge::harvester
