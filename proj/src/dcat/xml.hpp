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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace lodbridge::dcat::xml {

struct Attr {
  std::string ns;     // resolved namespace IRI, empty when unprefixed
  std::string local;
  std::string qname;  // as written
  std::string value;
};

struct Element {
  std::string ns;
  std::string local;
  std::string qname;
  std::vector<Attr> attrs;
  std::vector<std::unique_ptr<Element>> children;
  // Character data with raw whitespace at both edges removed before entity
  // decoding; whitespace written as character references survives.
  std::string text;
  bool has_text = false;
  std::size_t line = 1;
  std::size_t column = 1;

  const Attr* attr(std::string_view ns_iri, std::string_view local_name) const;
};

/// Namespace-aware parse of a single-root document. Returns nullptr for an
/// empty (or prolog-only) document. Throws SyntaxError.
std::unique_ptr<Element> parse(std::string_view text);

std::string escape_text(std::string_view s);
std::string escape_attr(std::string_view s);

}  // namespace lodbridge::dcat::xml
