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
#include <string_view>

#include <json.hpp>

namespace lodbridge {

/// Documents keep insertion order; entity key-values output depends on it.
using Json = nlohmann::ordered_json;

/// Rewrites floating-point values that hold an integer (0.0, 42.0) as
/// integers, recursively. Serialization then emits the shortest form.
Json normalize_numbers(Json doc);

/// Compact dump with normalized numbers, insertion order kept.
std::string dump_compact(const Json& doc);

/// Compact dump with normalized numbers and object keys sorted
/// lexicographically at every level. Two documents are considered equal
/// "after canonical formatting" iff their canonical dumps are equal.
std::string canonical_dump(const Json& doc);

Json parse_json(std::string_view text);

/// Resolves a dotted path (`address.addressLocality`) against an object tree.
const Json* find_path(const Json& doc, std::string_view dotted_path);

/// Writes `value` at a dotted path, creating intermediate objects.
void set_path(Json& doc, std::string_view dotted_path, Json value);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);
std::string read_text_file(const std::string& path);

}  // namespace lodbridge
