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

#include "lodbridge/dataflow/transform.hpp"

#include <algorithm>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::dataflow {

std::optional<StringOp> string_op_from_string(std::string_view s) {
  if (s == "none") return StringOp::none;
  if (s == "titlecase") return StringOp::titlecase;
  if (s == "uppercase") return StringOp::uppercase;
  if (s == "lowercase") return StringOp::lowercase;
  return std::nullopt;
}

std::string apply_string_op(StringOp op, std::string_view s) {
  switch (op) {
    case StringOp::none: return std::string(s);
    case StringOp::titlecase: return text::titlecase(s);
    case StringOp::uppercase: return text::to_upper(s);
    case StringOp::lowercase: return text::to_lower(s);
  }
  return std::string(s);
}

namespace {

bool path_prefix(const std::string& a, const std::string& b) {
  return b.size() > a.size() && b.compare(0, a.size(), a) == 0 && b[a.size()] == '.';
}

std::string stringify(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  return dump_compact(v);
}

TransformRule rule_from_json(const Json& doc) {
  TransformRule r;
  r.target_path = doc.at("targetPath").get<std::string>();
  const int sources = doc.contains("sourcePath") + doc.contains("constant") + doc.contains("template");
  if (sources != 1) {
    throw Error(Errc::validation, "rule '" + r.target_path + "' needs exactly one of sourcePath, constant, template");
  }
  if (doc.contains("sourcePath")) {
    r.source = TransformRule::Source::path;
    r.source_path = doc.at("sourcePath").get<std::string>();
  } else if (doc.contains("constant")) {
    r.source = TransformRule::Source::constant;
    r.constant = doc.at("constant");
  } else {
    r.source = TransformRule::Source::template_text;
    r.template_text = doc.at("template").get<std::string>();
  }
  if (doc.contains("stringOp")) {
    auto op = string_op_from_string(doc.at("stringOp").get<std::string>());
    if (!op) throw Error(Errc::validation, "rule '" + r.target_path + "': unknown stringOp");
    r.string_op = *op;
  }
  if (doc.contains("timeOp")) {
    const auto& t = doc.at("timeOp");
    r.time_op = TimeOp{t.value("parseFormat", ""), t.value("emitUtcFraction2", true)};
  }
  return r;
}

Json apply_time_op(const TimeOp& op, const Json& value, const std::string& target) {
  if (!value.is_string()) throw Error(Errc::type_mismatch, "timeOp on '" + target + "' needs a string");
  const auto raw = value.get<std::string>();
  auto t = op.parse_format.empty() ? parse_iso8601(raw) : parse_with_format(raw, op.parse_format);
  if (!t) throw Error(Errc::invalid_argument, "'" + raw + "' does not match the time format of '" + target + "'");
  if (op.emit_utc_fraction2) return format_utc(*t);
  return raw;
}

}  // namespace

void TransformSpec::check() const {
  for (std::size_t i = 0; i < rules.size(); ++i) {
    if (rules[i].target_path.empty()) throw Error(Errc::validation, "empty targetPath");
    for (std::size_t j = 0; j < i; ++j) {
      const auto& a = rules[j].target_path;
      const auto& b = rules[i].target_path;
      if (a == b || path_prefix(a, b) || path_prefix(b, a)) {
        throw Error(Errc::validation, "targetPaths '" + a + "' and '" + b + "' collide");
      }
    }
  }
}

TransformSpec TransformSpec::from_json(const Json& doc) {
  TransformSpec spec;
  try {
    for (const auto& r : doc.at("rules")) spec.rules.push_back(rule_from_json(r));
    const auto mode = doc.value("onMissing", "fail");
    if (mode == "fail") spec.on_missing = OnMissing::fail;
    else if (mode == "skip") spec.on_missing = OnMissing::skip;
    else throw Error(Errc::validation, "onMissing must be fail or skip");
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad transform spec: ") + e.what());
  }
  spec.check();
  return spec;
}

TransformSpec TransformSpec::load(const std::string& path) { return from_json(read_json_file(path)); }

std::string interpolate(std::string_view text, const Json& doc) {
  std::string out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto open = text.find("${", pos);
    if (open == std::string_view::npos) {
      out += text.substr(pos);
      break;
    }
    out += text.substr(pos, open - pos);
    const auto close = text.find('}', open);
    if (close == std::string_view::npos) throw Error(Errc::validation, "unterminated ${ in template");
    auto expr = std::string(text.substr(open + 2, close - open - 2));
    StringOp op = StringOp::none;
    if (const auto bar = expr.find('|'); bar != std::string::npos) {
      auto parsed = string_op_from_string(text::trim(expr.substr(bar + 1)));
      if (!parsed) throw Error(Errc::validation, "unknown template filter in '${" + expr + "}'");
      op = *parsed;
      expr = std::string(text::trim(expr.substr(0, bar)));
    }
    const auto* value = find_path(doc, expr);
    if (value == nullptr) throw Error(Errc::not_found, "template variable '" + expr + "' is unresolved");
    out += apply_string_op(op, stringify(*value));
    pos = close + 1;
  }
  return out;
}

Json apply_transform(const Json& document, const TransformSpec& spec) {
  if (!document.is_object()) throw Error(Errc::malformed, "transform input must be a JSON object");
  Json out = Json::object();
  for (const auto& rule : spec.rules) {
    Json value;
    try {
      switch (rule.source) {
        case TransformRule::Source::path: {
          const auto* found = find_path(document, rule.source_path);
          if (found == nullptr) {
            throw Error(Errc::not_found, "source path '" + rule.source_path + "' is unresolved");
          }
          value = *found;
          break;
        }
        case TransformRule::Source::constant: value = rule.constant; break;
        case TransformRule::Source::template_text: value = interpolate(rule.template_text, document); break;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::not_found && spec.on_missing == OnMissing::skip) continue;
      throw;
    }
    if (rule.time_op) value = apply_time_op(*rule.time_op, value, rule.target_path);
    if (rule.string_op != StringOp::none) {
      if (!value.is_string()) throw Error(Errc::type_mismatch, "stringOp on '" + rule.target_path + "' needs a string");
      value = apply_string_op(rule.string_op, value.get<std::string>());
    }
    set_path(out, rule.target_path, std::move(value));
  }
  return out;
}

}  // namespace lodbridge::dataflow
