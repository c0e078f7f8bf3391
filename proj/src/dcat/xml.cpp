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

#include "xml.hpp"

#include <cctype>
#include <map>

#include "lodbridge/common/error.hpp"
#include "names.hpp"

namespace lodbridge::dcat::xml {

const Attr* Element::attr(std::string_view ns_iri, std::string_view local_name) const {
  for (const auto& a : attrs) {
    if (a.ns == ns_iri && a.local == local_name) return &a;
  }
  return nullptr;
}

namespace {

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '_' || c == '-' || c == '.' || c == ':' || u >= 0x80;
}

struct RawElement {
  std::string qname;
  std::vector<std::pair<std::string, std::string>> attrs;
  std::size_t line, column;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  std::unique_ptr<Element> run() {
    skip_misc();
    if (eof()) return nullptr;
    if (peek() != '<') fail("expected root element");
    std::vector<std::map<std::string, std::string>> scopes{{{"xml", std::string(kXmlNs)}}};
    auto root = element(scopes);
    skip_misc();
    if (!eof()) fail("content after root element");
    return root;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }
  bool starts(std::string_view t) const { return s_.substr(pos_, t.size()) == t; }

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

  void expect(std::string_view t) {
    if (!starts(t)) fail("expected '" + std::string(t) + "'");
    advance(t.size());
  }

  void skip_space() {
    while (!eof() && is_space(peek())) advance();
  }

  void skip_until(std::string_view end, const char* what) {
    while (!eof() && !starts(end)) advance();
    if (eof()) fail(std::string("unterminated ") + what);
    advance(end.size());
  }

  // Whitespace, comments, processing instructions and a DOCTYPE without an
  // internal subset.
  void skip_misc() {
    for (;;) {
      skip_space();
      if (starts("<?")) {
        skip_until("?>", "processing instruction");
      } else if (starts("<!--")) {
        skip_until("-->", "comment");
      } else if (starts("<!DOCTYPE")) {
        skip_until(">", "DOCTYPE");
      } else {
        return;
      }
    }
  }

  std::string name() {
    const std::size_t start = pos_;
    while (!eof() && is_name_char(peek())) advance();
    if (pos_ == start) fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) fail("unterminated entity reference");
      const auto ent = raw.substr(i + 1, semi - i - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else if (ent.size() > 1 && ent[0] == '#') {
        unsigned long cp = 0;
        try {
          cp = (ent[1] == 'x' || ent[1] == 'X') ? std::stoul(std::string(ent.substr(2)), nullptr, 16)
                                                : std::stoul(std::string(ent.substr(1)), nullptr, 10);
        } catch (const std::exception&) {
          fail("bad character reference");
        }
        append_utf8(out, cp);
      } else {
        fail("unknown entity '" + std::string(ent) + "'");
      }
      i = semi;
    }
    return out;
  }

  std::string attr_value() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
    advance();
    const std::size_t start = pos_;
    while (!eof() && peek() != quote) {
      if (peek() == '<') fail("'<' in attribute value");
      advance();
    }
    if (eof()) fail("unterminated attribute value");
    const auto raw = s_.substr(start, pos_ - start);
    advance();
    return decode(raw);
  }

  static std::pair<std::string, std::string> split_qname(const std::string& q) {
    const auto colon = q.find(':');
    if (colon == std::string::npos) return {"", q};
    return {q.substr(0, colon), q.substr(colon + 1)};
  }

  std::string resolve(const std::vector<std::map<std::string, std::string>>& scopes,
                      const std::string& prefix, bool is_attr, std::size_t line,
                      std::size_t col) const {
    if (prefix.empty() && is_attr) return {};
    for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
      auto found = it->find(prefix);
      if (found != it->end()) return found->second;
    }
    if (prefix.empty()) return {};
    throw SyntaxError("undeclared namespace prefix '" + prefix + "'", line, col);
  }

  std::unique_ptr<Element> element(std::vector<std::map<std::string, std::string>>& scopes) {
    RawElement raw{{}, {}, line_, col_};
    expect("<");
    raw.qname = name();
    for (;;) {
      const bool had_space = !eof() && is_space(peek());
      skip_space();
      if (starts("/>") || starts(">")) break;
      if (!had_space) fail("expected whitespace before attribute");
      auto attr_name = name();
      skip_space();
      expect("=");
      skip_space();
      raw.attrs.emplace_back(std::move(attr_name), attr_value());
    }

    std::map<std::string, std::string> scope;
    for (const auto& [k, v] : raw.attrs) {
      if (k == "xmlns") scope[""] = v;
      else if (k.rfind("xmlns:", 0) == 0) scope[k.substr(6)] = v;
    }
    scopes.push_back(std::move(scope));

    auto el = std::make_unique<Element>();
    el->qname = raw.qname;
    el->line = raw.line;
    el->column = raw.column;
    auto [prefix, local] = split_qname(raw.qname);
    el->ns = resolve(scopes, prefix, false, raw.line, raw.column);
    el->local = local;
    for (const auto& [k, v] : raw.attrs) {
      if (k == "xmlns" || k.rfind("xmlns:", 0) == 0) continue;
      auto [ap, al] = split_qname(k);
      el->attrs.push_back(Attr{resolve(scopes, ap, true, raw.line, raw.column), al, k, v});
    }

    if (starts("/>")) {
      advance(2);
      scopes.pop_back();
      return el;
    }
    expect(">");

    std::string raw_text;
    for (;;) {
      if (eof()) fail("unterminated element <" + raw.qname + ">");
      if (starts("</")) {
        advance(2);
        const auto close_line = line_;
        const auto close_col = col_;
        const auto close = name();
        if (close != raw.qname) {
          throw SyntaxError("mismatched closing tag </" + close + "> for <" + raw.qname + ">",
                            close_line, close_col);
        }
        skip_space();
        expect(">");
        break;
      }
      if (starts("<!--")) {
        skip_until("-->", "comment");
      } else if (starts("<![CDATA[")) {
        advance(9);
        const auto start = pos_;
        while (!eof() && !starts("]]>")) advance();
        if (eof()) fail("unterminated CDATA section");
        // Escape so the later decode pass leaves the content untouched.
        for (char c : s_.substr(start, pos_ - start)) {
          if (c == '&') raw_text += "&amp;"; else raw_text.push_back(c);
        }
        advance(3);
      } else if (starts("<?")) {
        skip_until("?>", "processing instruction");
      } else if (peek() == '<') {
        el->children.push_back(element(scopes));
      } else {
        raw_text.push_back(peek());
        advance();
      }
    }

    std::size_t b = 0, e = raw_text.size();
    while (b < e && is_space(raw_text[b])) ++b;
    while (e > b && is_space(raw_text[e - 1])) --e;
    el->has_text = b < e;
    el->text = decode(std::string_view(raw_text).substr(b, e - b));
    scopes.pop_back();
    return el;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string escape_char(char c, bool attr) {
  switch (c) {
    case '&': return "&amp;";
    case '<': return "&lt;";
    case '>': return "&gt;";
    case '"': return attr ? "&quot;" : "\"";
    case '\r': return "&#xD;";
    case '\n': return attr ? "&#xA;" : "\n";
    case '\t': return attr ? "&#x9;" : "\t";
    default: return std::string(1, c);
  }
}

std::string char_ref(char c) {
  static const char* hex = "0123456789ABCDEF";
  const auto u = static_cast<unsigned char>(c);
  std::string out = "&#x";
  if (u >= 16) out.push_back(hex[u >> 4]);
  out.push_back(hex[u & 0xF]);
  out.push_back(';');
  return out;
}

}  // namespace

std::unique_ptr<Element> parse(std::string_view text) { return Parser(text).run(); }

std::string escape_text(std::string_view s) {
  // Edge whitespace goes out as character references so a reader that trims
  // layout whitespace still recovers it.
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i < b || i >= e) out += char_ref(s[i]);
    else out += escape_char(s[i], false);
  }
  return out;
}

std::string escape_attr(std::string_view s) {
  std::string out;
  for (char c : s) out += escape_char(c, true);
  return out;
}

}  // namespace lodbridge::dcat::xml
