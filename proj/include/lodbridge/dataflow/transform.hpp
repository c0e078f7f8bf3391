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

#include <optional>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"

namespace lodbridge::dataflow {

enum class StringOp { none, titlecase, uppercase, lowercase };

std::optional<StringOp> string_op_from_string(std::string_view s);
std::string apply_string_op(StringOp op, std::string_view s);

struct TimeOp {
  std::string parse_format;  // strftime subset; empty = ISO 8601
  bool emit_utc_fraction2 = true;
};

struct TransformRule {
  enum class Source { path, constant, template_text };

  std::string target_path;
  Source source = Source::path;
  std::string source_path;
  Json constant;
  std::string template_text;  // `${path}` or `${path|titlecase}`
  StringOp string_op = StringOp::none;
  std::optional<TimeOp> time_op;
};

enum class OnMissing { fail, skip };

struct TransformSpec {
  std::vector<TransformRule> rules;
  OnMissing on_missing = OnMissing::fail;

  /// Throws Error(validation) on duplicate or overlapping target paths.
  void check() const;

  static TransformSpec from_json(const Json& doc);
  static TransformSpec load(const std::string& path);
};

/// Output holds exactly the rule targets, in rule order. An unresolved
/// source path throws Error(not_found) under OnMissing::fail and drops the
/// rule under OnMissing::skip.
Json apply_transform(const Json& document, const TransformSpec& spec);

/// Expands `${path}` / `${path|op}` against `doc`. Strings interpolate
/// as-is, other values as compact JSON. Throws Error(not_found) for an
/// unresolved path.
std::string interpolate(std::string_view text, const Json& doc);

}  // namespace lodbridge::dataflow
