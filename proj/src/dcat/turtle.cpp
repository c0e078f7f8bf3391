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

namespace lodbridge::dcat {

namespace {

std::string escape_string(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* hex = "0123456789ABCDEF";
          out += "\\u00";
          out.push_back(hex[(c >> 4) & 0xF]);
          out.push_back(hex[c & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  return out;
}

bool valid_turtle_local(std::string_view local) {
  if (local.empty()) return false;
  if (local.back() == '.' || local.front() == '.' || local.front() == '-') return false;
  for (char c : local) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

class TurtleWriter {
 public:
  explicit TurtleWriter(const Graph& g) : g_(g), prefixes_(prologue_namespaces(g)) {}

  std::string run() {
    std::string out;
    for (const auto& [prefix, iri] : prefixes_) out += "@prefix " + prefix + ": <" + iri + "> .\n";
    const Term* subject = nullptr;
    const Term* predicate = nullptr;
    for (const auto& t : g_) {
      if (subject == nullptr || t.subject != *subject) {
        if (subject != nullptr) out += " .\n";
        out += "\n" + term(t.subject) + "\n    " + predicate_name(t.predicate) + " " + term(t.object);
      } else if (t.predicate != *predicate) {
        out += " ;\n    " + predicate_name(t.predicate) + " " + term(t.object);
      } else {
        out += ",\n        " + term(t.object);
      }
      subject = &t.subject;
      predicate = &t.predicate;
    }
    if (subject != nullptr) out += " .\n";
    return out;
  }

 private:

  std::string name(const std::string& value) const {
    std::string best;
    for (const auto& [prefix, base] : prefixes_) {
      if (value.size() > base.size() && value.compare(0, base.size(), base) == 0) {
        const auto local = std::string_view(value).substr(base.size());
        if (valid_turtle_local(local) && base.size() > best.size()) {
          best = prefix + ":" + std::string(local);
        }
      }
    }
    return best.empty() ? "<" + value + ">" : best;
  }

  std::string predicate_name(const Term& p) const {
    if (p.value == std::string(ns::rdf) + "type") return "a";
    return name(p.value);
  }

  std::string blank(const std::string& label) {
    auto [it, inserted] = blanks_.emplace(label, "b" + std::to_string(blanks_.size()));
    return "_:" + it->second;
  }

  std::string term(const Term& t) {
    switch (t.kind) {
      case TermKind::iri: return name(t.value);
      case TermKind::blank: return blank(t.value);
      case TermKind::literal: {
        std::string out = "\"" + escape_string(t.value) + "\"";
        if (!t.lang.empty()) out += "@" + t.lang;
        if (!t.datatype.empty()) out += "^^" + name(t.datatype);
        return out;
      }
    }
    return {};
  }

  const Graph& g_;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, std::string> blanks_;
};

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view s) : s_(s) {}

  Graph run() {
    for (;;) {
      skip_ws();
      if (eof()) break;
      if (keyword("@prefix")) {
        prefix_decl(true);
      } else if (keyword("PREFIX", true)) {
        prefix_decl(false);
      } else if (keyword("@base") || keyword("BASE", true)) {
        fail("unsupported construct: base IRI");
      } else {
        triples();
        skip_ws();
        expect('.');
      }
    }
    return std::move(g_);
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }

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

  void expect(char c) {
    if (peek() != c) {
      fail(eof() ? std::string("unexpected end of input, expected '") + c + "'"
                 : std::string("expected '") + c + "', found '" + peek() + "'");
    }
    advance();
  }

  void skip_ws() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  bool keyword(std::string_view kw, bool case_insensitive = false) {
    if (s_.size() - pos_ < kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      char a = s_[pos_ + i], b = kw[i];
      if (case_insensitive) {
        a = static_cast<char>(std::toupper(static_cast<unsigned char>(a)));
        b = static_cast<char>(std::toupper(static_cast<unsigned char>(b)));
      }
      if (a != b) return false;
    }
    const char next = peek(kw.size());
    if (std::isalnum(static_cast<unsigned char>(next)) || next == ':' || next == '_') return false;
    advance(kw.size());
    return true;
  }

  static bool pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  std::string pn_token(bool allow_colon) {
    const std::size_t start = pos_;
    while (!eof() && (pn_char(peek()) || (allow_colon && (peek() == ':' || peek() == '%')))) advance();
    // A trailing '.' terminates the statement rather than the name.
    while (pos_ > start && s_[pos_ - 1] == '.') {
      --pos_;
      --col_;
    }
    return std::string(s_.substr(start, pos_ - start));
  }

  void prefix_decl(bool at_form) {
    skip_ws();
    const auto prefix = pn_token(false);
    expect(':');
    skip_ws();
    const auto iri = iri_ref();
    prefixes_[prefix] = iri;
    g_.bind(prefix, iri);
    if (at_form) {
      skip_ws();
      expect('.');
    }
  }

  std::string iri_ref() {
    expect('<');
    std::string out;
    while (!eof() && peek() != '>') {
      const char c = peek();
      if (c == ' ' || c == '\n' || c == '"' || c == '<') fail("invalid character in IRI");
      out.push_back(c);
      advance();
    }
    expect('>');
    return out;
  }

  std::string iri() {
    if (peek() == '<') {
      if (peek(1) == '<') fail("unsupported construct: quoted triple");
      return iri_ref();
    }
    const auto line = line_;
    const auto col = col_;
    const auto prefix = pn_token(false);
    if (peek() != ':') {
      throw SyntaxError(prefix.empty() ? "expected an IRI" : "unexpected token '" + prefix + "'",
                        line, col);
    }
    advance();
    const auto local = pn_token(true);
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw SyntaxError("undeclared prefix '" + prefix + "'", line, col);
    return it->second + local;
  }

  Term blank_label() {
    advance(2);  // "_:"
    const auto label = pn_token(false);
    if (label.empty()) fail("empty blank node label");
    auto [it, inserted] = labels_.emplace(label, "");
    if (inserted) it->second = fresh();
    return Term::blank(it->second);
  }

  std::string fresh() { return "b" + std::to_string(next_blank_++); }

  Term subject() {
    if (peek() == '_' && peek(1) == ':') return blank_label();
    if (peek() == '[') return blank_property_list();
    if (peek() == '(') fail("unsupported construct: collection");
    if (peek() == '"' || peek() == '\'') fail("literal in subject position");
    return Term::iri(iri());
  }

  Term blank_property_list() {
    expect('[');
    auto node = Term::blank(fresh());
    skip_ws();
    if (peek() != ']') {
      predicate_object_list(node);
      skip_ws();
    }
    expect(']');
    return node;
  }

  void triples() {
    const bool bracketed = peek() == '[';
    auto s = subject();
    skip_ws();
    if (bracketed && peek() == '.') return;
    predicate_object_list(s);
  }

  Term verb() {
    if (peek() == 'a') {
      const char next = peek(1);
      if (next == ' ' || next == '\t' || next == '\n' || next == '\r' || next == '<' ||
          next == '"' || next == '[' || next == '_') {
        advance();
        return Term::iri(std::string(ns::rdf) + "type");
      }
    }
    return Term::iri(iri());
  }

  void predicate_object_list(const Term& s) {
    for (;;) {
      auto p = verb();
      for (;;) {
        skip_ws();
        g_.add(s, p, object());
        skip_ws();
        if (peek() != ',') break;
        advance();
      }
      skip_ws();
      if (peek() != ';') return;
      while (peek() == ';') {
        advance();
        skip_ws();
      }
      if (peek() == '.' || peek() == ']' || eof()) return;
    }
  }

  std::string string_body() {
    const char q = peek();
    const bool long_form = peek(1) == q && peek(2) == q;
    advance(long_form ? 3 : 1);
    std::string out;
    for (;;) {
      if (eof()) fail("unterminated string literal");
      const char c = peek();
      if (long_form) {
        if (c == q && peek(1) == q && peek(2) == q) {
          advance(3);
          break;
        }
      } else {
        if (c == q) {
          advance();
          break;
        }
        if (c == '\n' || c == '\r') fail("newline in short string literal");
      }
      if (c == '\\') {
        advance();
        const char e = peek();
        switch (e) {
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 't': out += '\t'; break;
          case 'b': out += '\b'; break;
          case 'f': out += '\f'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          case 'u':
          case 'U': {
            const std::size_t n = e == 'u' ? 4 : 8;
            std::string hex(s_.substr(pos_ + 1, n));
            if (hex.size() != n) fail("truncated unicode escape");
            unsigned long cp = 0;
            try {
              cp = std::stoul(hex, nullptr, 16);
            } catch (const std::exception&) {
              fail("bad unicode escape");
            }
            append_utf8(out, cp);
            advance(n);
            break;
          }
          default: fail(std::string("bad escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      out.push_back(c);
      advance();
    }
    return out;
  }

  Term literal() {
    auto lexical = string_body();
    if (peek() == '@') {
      advance();
      const std::size_t start = pos_;
      while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) advance();
      if (pos_ == start) fail("empty language tag");
      return Term::literal(std::move(lexical), {}, std::string(s_.substr(start, pos_ - start)));
    }
    if (peek() == '^' && peek(1) == '^') {
      advance(2);
      return Term::literal(std::move(lexical), iri());
    }
    return Term::literal(std::move(lexical));
  }

  Term number() {
    const std::size_t start = pos_;
    if (peek() == '+' || peek() == '-') advance();
    bool digits = false, dot = false, exp = false;
    while (std::isdigit(static_cast<unsigned char>(peek()))) {
      advance();
      digits = true;
    }
    if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      dot = true;
      advance();
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      digits = true;
    }
    if (digits && (peek() == 'e' || peek() == 'E')) {
      exp = true;
      advance();
      if (peek() == '+' || peek() == '-') advance();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) fail("malformed exponent");
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
    }
    if (!digits) fail("malformed number");
    const auto text = std::string(s_.substr(start, pos_ - start));
    const char* type = exp ? "double" : dot ? "decimal" : "integer";
    return Term::literal(text, std::string(ns::xsd) + type);
  }

  Term object() {
    const char c = peek();
    if (c == '"' || c == '\'') return literal();
    if (c == '_' && peek(1) == ':') return blank_label();
    if (c == '[') return blank_property_list();
    if (c == '(') fail("unsupported construct: collection");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return number();
    }
    if (keyword("true")) return Term::literal("true", std::string(ns::xsd) + "boolean");
    if (keyword("false")) return Term::literal("false", std::string(ns::xsd) + "boolean");
    if (eof()) fail("unexpected end of input, expected an object");
    return Term::iri(iri());
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  Graph g_;
  std::map<std::string, std::string> prefixes_;
  std::map<std::string, std::string> labels_;
  std::size_t next_blank_ = 0;
};

}  // namespace

std::string serialize_turtle(const Graph& graph) { return TurtleWriter(graph).run(); }

Graph parse_turtle(std::string_view text) { return TurtleReader(text).run(); }

}  // namespace lodbridge::dcat
