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

#include <string>
#include <string_view>
#include <vector>

namespace lodbridge::text {

std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

/// "SANTANDER" -> "Santander", "new york" -> "New York". ASCII only.
std::string titlecase(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool contains_case_insensitive(std::string_view haystack, std::string_view needle);

/// Lowercases, turns runs of non-alphanumerics into single hyphens and
/// strips leading/trailing hyphens: "Santander AEMET Weather" ->
/// "santander-aemet-weather".
std::string slugify(std::string_view s);

/// Lowercase alphanumerics and single inner hyphens only.
bool is_valid_slug(std::string_view s);

std::string url_encode(std::string_view s);
std::string url_decode(std::string_view s);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view s);

/// Splits one RFC 4180 record. Quoted fields may not span lines here.
std::vector<std::string> parse_csv_line(std::string_view line);

std::string hex_sha256(std::string_view data);

}  // namespace lodbridge::text
