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

#include "lodbridge/common/json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "lodbridge/common/error.hpp"

namespace lodbridge {

Json normalize_numbers(Json doc) {
  if (doc.is_number_float()) {
    const double v = doc.get<double>();
    if (std::isfinite(v) && std::trunc(v) == v &&
        std::abs(v) < static_cast<double>(std::numeric_limits<std::int64_t>::max())) {
      return Json(static_cast<std::int64_t>(v));
    }
    return doc;
  }
  if (doc.is_object() || doc.is_array()) {
    for (auto& child : doc) {
      child = normalize_numbers(std::move(child));
    }
  }
  return doc;
}

std::string dump_compact(const Json& doc) {
  return normalize_numbers(doc).dump();
}

namespace {

// nlohmann::json (not ordered) stores objects in std::map, which gives the
// sorted-key layout for free.
nlohmann::json to_sorted(const Json& doc) {
  if (doc.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [key, value] : doc.items()) {
      out[key] = to_sorted(value);
    }
    return out;
  }
  if (doc.is_array()) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& value : doc) {
      out.push_back(to_sorted(value));
    }
    return out;
  }
  switch (doc.type()) {
    case Json::value_t::string: return doc.get<std::string>();
    case Json::value_t::boolean: return doc.get<bool>();
    case Json::value_t::number_integer: return doc.get<std::int64_t>();
    case Json::value_t::number_unsigned: return doc.get<std::uint64_t>();
    case Json::value_t::number_float: return doc.get<double>();
    default: return nullptr;
  }
}

}  // namespace

std::string canonical_dump(const Json& doc) {
  return to_sorted(normalize_numbers(doc)).dump();
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::malformed, std::string("invalid JSON: ") + e.what());
  }
}

const Json* find_path(const Json& doc, std::string_view dotted_path) {
  const Json* node = &doc;
  std::size_t start = 0;
  while (start <= dotted_path.size()) {
    const auto dot = dotted_path.find('.', start);
    const auto key = dotted_path.substr(start, dot == std::string_view::npos ? std::string_view::npos
                                                                              : dot - start);
    if (!node->is_object()) return nullptr;
    auto it = node->find(std::string(key));
    if (it == node->end()) return nullptr;
    node = &*it;
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return node;
}

void set_path(Json& doc, std::string_view dotted_path, Json value) {
  Json* node = &doc;
  std::size_t start = 0;
  for (;;) {
    const auto dot = dotted_path.find('.', start);
    const std::string key(dotted_path.substr(
        start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
    if (!node->is_object()) *node = Json::object();
    if (dot == std::string_view::npos) {
      (*node)[key] = std::move(value);
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json read_json_file(const std::string& path) {
  return parse_json(read_text_file(path));
}

void write_text_file(const std::string& path, std::string_view text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const auto tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io, "cannot write " + tmp);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(Errc::io, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace lodbridge
