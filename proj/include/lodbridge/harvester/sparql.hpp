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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/dcat/graph.hpp"

namespace lodbridge::harvester {

struct PatternTerm {
  std::string variable;  // non-empty for ?v
  dcat::Term term;

  bool is_variable() const { return !variable.empty(); }
  static PatternTerm var(std::string name) { return PatternTerm{std::move(name), {}}; }
  static PatternTerm constant(dcat::Term t) { return PatternTerm{{}, std::move(t)}; }
};

struct TriplePattern {
  PatternTerm subject;
  PatternTerm predicate;
  PatternTerm object;
};

struct RegexFilter {
  std::string variable;
  std::string pattern;
};

struct QueryPlan {
  std::map<std::string, std::string> prefixes;
  std::vector<std::string> select_vars;
  bool distinct = false;
  std::vector<TriplePattern> patterns;
  std::vector<RegexFilter> filters;
  std::optional<std::size_t> limit;
};

/// Grammar: PREFIX declarations; SELECT [DISTINCT] ?v...; WHERE { triple
/// patterns separated by '.', with ';' and ',' abbreviations, and
/// FILTER regex(str(?v), "...") }; LIMIT n. Throws SyntaxError with
/// line/column, or Error(unsupported) naming the construct.
QueryPlan parse_query(std::string_view text);

/// Throws Error(unsupported) for regex features outside the supported
/// subset (literals, classes, anchors, . * + ? |, groups).
void check_regex_subset(std::string_view pattern);

struct ResultTable {
  std::vector<std::string> variables;
  std::vector<std::vector<dcat::Term>> rows;

  /// SPARQL 1.1 JSON results shape.
  Json to_json() const;
  std::string to_table() const;
};

/// Lexical form used by str(): IRI text, literal lexical form, blank label.
std::string lexical_form(const dcat::Term& t);

/// Bindings of every pattern over `g`, filtered, projected, sorted
/// lexicographically by the N-Triples form of each bound term, deduplicated
/// when DISTINCT, then truncated at LIMIT.
ResultTable execute_query(const QueryPlan& plan, const dcat::Graph& g);

}  // namespace lodbridge::harvester
