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

#include "lodbridge/mqa/mqa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/dcat/shapes.hpp"

namespace lodbridge::mqa {

namespace {

using dcat::Term;

constexpr const char* kDefaultTable = R"({
  "thresholds": {"excellent": 351, "good": 221, "sufficient": 121},
  "indicators": [
    {"id": "keywords", "dimension": "Findability", "weight": 30, "check": "property-present", "properties": ["dcat:keyword"]},
    {"id": "themes", "dimension": "Findability", "weight": 30, "check": "property-present", "properties": ["dcat:theme"]},
    {"id": "spatial", "dimension": "Findability", "weight": 20, "check": "property-present", "properties": ["dct:spatial"]},
    {"id": "temporal", "dimension": "Findability", "weight": 20, "check": "property-present", "properties": ["dct:temporal"]},
    {"id": "access-url-status", "dimension": "Accessibility", "weight": 50, "check": "url-status", "properties": ["dcat:accessURL"], "level": "distribution"},
    {"id": "download-url", "dimension": "Accessibility", "weight": 20, "check": "property-present", "properties": ["dcat:downloadURL"], "level": "distribution"},
    {"id": "download-url-status", "dimension": "Accessibility", "weight": 30, "check": "url-status", "properties": ["dcat:downloadURL"], "fallback": "dcat:accessURL", "level": "distribution"},
    {"id": "format", "dimension": "Interoperability", "weight": 20, "check": "property-present", "properties": ["dct:format"], "level": "distribution"},
    {"id": "media-type", "dimension": "Interoperability", "weight": 10, "check": "property-present", "properties": ["dcat:mediaType"], "level": "distribution"},
    {"id": "format-vocabulary", "dimension": "Interoperability", "weight": 10, "check": "property-in-vocabulary", "properties": ["dct:format", "dcat:mediaType"], "level": "distribution", "vocabulary": "file-types"},
    {"id": "format-non-proprietary", "dimension": "Interoperability", "weight": 20, "check": "property-in-vocabulary", "properties": ["dct:format", "dcat:mediaType"], "level": "distribution", "vocabulary": "non-proprietary"},
    {"id": "format-machine-readable", "dimension": "Interoperability", "weight": 20, "check": "format-machine-readable", "properties": ["dct:format", "dcat:mediaType"], "level": "distribution"},
    {"id": "dcat-ap-conformance", "dimension": "Interoperability", "weight": 30, "check": "dcat-ap-conformance"},
    {"id": "license", "dimension": "Reusability", "weight": 20, "check": "property-present", "properties": ["dct:license"], "level": "distribution"},
    {"id": "license-vocabulary", "dimension": "Reusability", "weight": 10, "check": "property-in-vocabulary", "properties": ["dct:license"], "level": "any", "vocabulary": "licences"},
    {"id": "access-rights", "dimension": "Reusability", "weight": 10, "check": "property-present", "properties": ["dct:accessRights"]},
    {"id": "access-rights-vocabulary", "dimension": "Reusability", "weight": 5, "check": "property-in-vocabulary", "properties": ["dct:accessRights"], "level": "any", "vocabulary": "access-rights"},
    {"id": "contact-point", "dimension": "Reusability", "weight": 20, "check": "property-present", "properties": ["dcat:contactPoint"]},
    {"id": "publisher", "dimension": "Reusability", "weight": 10, "check": "property-present", "properties": ["dct:publisher"]},
    {"id": "rights", "dimension": "Contextuality", "weight": 5, "check": "property-present", "properties": ["dct:rights"], "level": "distribution"},
    {"id": "byte-size", "dimension": "Contextuality", "weight": 5, "check": "property-present", "properties": ["dcat:byteSize"], "level": "distribution"},
    {"id": "issued", "dimension": "Contextuality", "weight": 5, "check": "property-present", "properties": ["dct:issued"]},
    {"id": "modified", "dimension": "Contextuality", "weight": 5, "check": "property-present", "properties": ["dct:modified"]}
  ]
})";

const std::vector<std::pair<Dimension, std::string_view>> kDimensions = {
    {Dimension::findability, "Findability"},
    {Dimension::accessibility, "Accessibility"},
    {Dimension::interoperability, "Interoperability"},
    {Dimension::reusability, "Reusability"},
    {Dimension::contextuality, "Contextuality"},
};

const std::vector<std::pair<CheckKind, std::string_view>> kChecks = {
    {CheckKind::property_present, "property-present"},
    {CheckKind::property_in_vocabulary, "property-in-vocabulary"},
    {CheckKind::url_status, "url-status"},
    {CheckKind::format_machine_readable, "format-machine-readable"},
    {CheckKind::dcat_ap_conformance, "dcat-ap-conformance"},
};

bool starts_with_any(const std::string& value, const std::vector<std::string>& prefixes) {
  return std::any_of(prefixes.begin(), prefixes.end(),
                     [&](const std::string& p) { return value.rfind(p, 0) == 0; });
}

std::set<std::string> string_set(const Json& doc, const char* key) {
  std::set<std::string> out;
  if (doc.contains(key)) {
    for (const auto& v : doc.at(key)) out.insert(text::to_upper(v.get<std::string>()));
  }
  return out;
}

std::vector<std::string> string_vector(const Json& doc, const char* key) {
  std::vector<std::string> out;
  if (doc.contains(key)) {
    for (const auto& v : doc.at(key)) out.push_back(v.get<std::string>());
  }
  return out;
}

Level level_from_string(const std::string& s) {
  if (s == "dataset") return Level::dataset;
  if (s == "distribution") return Level::distribution;
  if (s == "any") return Level::any;
  throw Error(Errc::validation, "unknown level '" + s + "'");
}

Indicator indicator_from_json(const Json& doc) {
  Indicator ind;
  ind.id = doc.at("id").get<std::string>();
  ind.dimension = dimension_from_string(doc.at("dimension").get<std::string>());
  ind.weight = doc.at("weight").get<int>();
  if (ind.weight < 0) throw Error(Errc::validation, "indicator " + ind.id + ": negative weight");
  ind.check = check_kind_from_string(doc.at("check").get<std::string>());
  for (const auto& p : string_vector(doc, "properties")) ind.properties.push_back(dcat::expand(p));
  ind.level = level_from_string(doc.value("level", "dataset"));
  if (doc.contains("fallback")) ind.fallback = dcat::expand(doc.at("fallback").get<std::string>());
  ind.vocabulary = doc.value("vocabulary", "");
  ind.shapes = doc.value("shapes", "");
  const bool needs_properties = ind.check != CheckKind::dcat_ap_conformance;
  if (needs_properties && ind.properties.empty()) {
    throw Error(Errc::validation, "indicator " + ind.id + ": 'properties' required");
  }
  if (ind.check == CheckKind::property_in_vocabulary && ind.vocabulary.empty()) {
    throw Error(Errc::validation, "indicator " + ind.id + ": 'vocabulary' required");
  }
  return ind;
}

class Evaluator {
 public:
  Evaluator(const dcat::Graph& g, const Term& dataset, const MqaConfig& config, const UrlChecker& urls)
      : g_(g), dataset_(dataset), config_(config), urls_(urls),
        distributions_(g.objects(dataset, Term::iri(dcat::expand("dcat:distribution")))) {}

  bool passes(const Indicator& ind) const {
    switch (ind.check) {
      case CheckKind::property_present: return !values(ind.properties, ind.level).empty();
      case CheckKind::property_in_vocabulary: {
        const auto vs = values(ind.properties, ind.level);
        return std::any_of(vs.begin(), vs.end(), [&](const Term& v) { return in_vocabulary(v, ind.vocabulary); });
      }
      case CheckKind::format_machine_readable: {
        const auto vs = values(ind.properties, ind.level);
        return std::any_of(vs.begin(), vs.end(), [&](const Term& v) {
          return config_.vocabularies.machine_readable.count(config_.vocabularies.format_label(v)) > 0;
        });
      }
      case CheckKind::url_status: {
        auto vs = values({ind.properties.front()}, ind.level);
        if (vs.empty() && ind.fallback) vs = values({*ind.fallback}, ind.level);
        return std::any_of(vs.begin(), vs.end(), [&](const Term& v) {
          if (!v.is_iri()) return false;
          const int status = urls_.status(v.value);
          return status >= 200 && status < 400;
        });
      }
      case CheckKind::dcat_ap_conformance: return conforms(ind);
    }
    return false;
  }

 private:
  std::vector<Term> values(const std::vector<std::string>& properties, Level level) const {
    std::vector<Term> out;
    for (const auto& p : properties) {
      const auto pred = Term::iri(p);
      if (level != Level::distribution) {
        for (auto& v : g_.objects(dataset_, pred)) out.push_back(std::move(v));
      }
      if (level != Level::dataset) {
        for (const auto& d : distributions_) {
          if (d.is_literal()) continue;
          for (auto& v : g_.objects(d, pred)) out.push_back(std::move(v));
        }
      }
    }
    return out;
  }

  bool in_vocabulary(const Term& v, const std::string& vocabulary) const {
    const auto& voc = config_.vocabularies;
    if (vocabulary == "file-types") {
      return v.is_iri() && starts_with_any(v.value, voc.format_namespaces) &&
             voc.file_types.count(voc.format_label(v)) > 0;
    }
    if (vocabulary == "non-proprietary") return voc.non_proprietary.count(voc.format_label(v)) > 0;
    if (vocabulary == "licences") return v.is_iri() && starts_with_any(v.value, voc.licence_namespaces);
    if (vocabulary == "access-rights") return v.is_iri() && starts_with_any(v.value, voc.access_right_namespaces);
    throw Error(Errc::validation, "unknown vocabulary '" + vocabulary + "'");
  }

  bool conforms(const Indicator& ind) const {
    const auto& all = ind.shapes.empty() ? dcat::ShapeSet::bundled() : dcat::ShapeSet::load(ind.shapes);
    // Only the dataset node itself is judged here; distributions and agents
    // are covered by their own indicators.
    dcat::ShapeSet dataset_shapes;
    for (const auto& s : all.shapes) {
      if (s.target_class == dcat::expand("dcat:Dataset")) dataset_shapes.shapes.push_back(s);
    }
    return dcat::validate_shapes(g_, dataset_shapes, dataset_).conforms();
  }

  const dcat::Graph& g_;
  Term dataset_;
  const MqaConfig& config_;
  const UrlChecker& urls_;
  std::vector<Term> distributions_;
};

double rounded_percentage(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  return std::round(100000.0 * static_cast<double>(count) / static_cast<double>(total)) / 1000.0;
}

}  // namespace

std::string_view to_string(Dimension d) {
  for (const auto& [k, v] : kDimensions) {
    if (k == d) return v;
  }
  return "?";
}

Dimension dimension_from_string(std::string_view s) {
  for (const auto& [k, v] : kDimensions) {
    if (text::to_lower(v) == text::to_lower(s)) return k;
  }
  throw Error(Errc::validation, "unknown dimension '" + std::string(s) + "'");
}

std::string_view to_string(CheckKind k) {
  for (const auto& [kind, name] : kChecks) {
    if (kind == k) return name;
  }
  return "?";
}

CheckKind check_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kChecks) {
    if (name == s) return kind;
  }
  throw Error(Errc::validation, "unknown check kind '" + std::string(s) + "'");
}

void RatingThresholds::check() const {
  if (!(excellent_min > good_min && good_min > sufficient_min && sufficient_min > 0)) {
    throw Error(Errc::validation, "thresholds must satisfy excellent > good > sufficient > 0");
  }
}

std::string Vocabularies::format_label(const Term& value) const {
  std::string raw = value.value;
  bool media_type = false;
  if (value.is_iri()) {
    for (const auto& ns : format_namespaces) {
      if (raw.rfind(ns, 0) == 0 && ns.find("media-types") != std::string::npos) media_type = true;
    }
    const auto cut = raw.find_last_of("/#");
    if (cut != std::string::npos) raw = raw.substr(cut + 1);
  } else if (raw.find('/') != std::string::npos) {
    media_type = true;
    raw = raw.substr(raw.find('/') + 1);
  }
  raw = std::string(text::trim(raw.substr(0, raw.find(';'))));
  if (media_type) {
    auto it = media_subtypes.find(text::to_lower(raw));
    if (it != media_subtypes.end()) return it->second;
  }
  return text::to_upper(raw);
}

Vocabularies Vocabularies::from_json(const Json& doc) {
  Vocabularies v;
  v.file_types = string_set(doc, "fileTypes");
  v.machine_readable = string_set(doc, "machineReadable");
  v.non_proprietary = string_set(doc, "nonProprietary");
  if (doc.contains("mediaSubtypes")) {
    for (const auto& [k, label] : doc.at("mediaSubtypes").items()) {
      v.media_subtypes[text::to_lower(k)] = text::to_upper(label.get<std::string>());
    }
  }
  v.format_namespaces = string_vector(doc, "formatNamespaces");
  v.licence_namespaces = string_vector(doc, "licenceNamespaces");
  v.access_right_namespaces = string_vector(doc, "accessRightNamespaces");
  return v;
}

const Vocabularies& Vocabularies::bundled() {
  static const Vocabularies v = from_json(read_json_file(std::string(LODBRIDGE_DATA_DIR) + "/mqa-vocabularies.json"));
  return v;
}

int MqaConfig::max_possible() const {
  int sum = 0;
  for (const auto& ind : indicators) sum += ind.weight;
  return sum;
}

const Json& MqaConfig::default_table() {
  static const Json table = parse_json(kDefaultTable);
  return table;
}

namespace {

MqaConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::validation, "MQA config must be an object");
  const auto& table = MqaConfig::default_table();
  MqaConfig config;
  const auto& th = doc.contains("thresholds") ? doc.at("thresholds") : table.at("thresholds");
  config.thresholds.excellent_min = th.at("excellent").get<int>();
  config.thresholds.good_min = th.at("good").get<int>();
  config.thresholds.sufficient_min = th.at("sufficient").get<int>();
  config.thresholds.check();
  const auto& inds = doc.contains("indicators") ? doc.at("indicators") : table.at("indicators");
  std::set<std::string> ids;
  for (const auto& item : inds) {
    auto ind = indicator_from_json(item);
    if (!ids.insert(ind.id).second) throw Error(Errc::validation, "duplicate indicator '" + ind.id + "'");
    config.indicators.push_back(std::move(ind));
  }
  config.vocabularies =
      doc.contains("vocabularies") ? Vocabularies::from_json(doc.at("vocabularies")) : Vocabularies::bundled();
  return config;
}

}  // namespace

MqaConfig MqaConfig::from_json(const Json& doc) {
  try {
    return config_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("MQA config: ") + e.what());
  }
}

MqaConfig MqaConfig::load(const std::string& path) {
  try {
    return from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

const MqaConfig& MqaConfig::defaults() {
  static const MqaConfig config = from_json(Json::object());
  return config;
}

int StatusMapUrlChecker::status(const std::string& url) const {
  auto it = statuses_.find(url);
  return it == statuses_.end() ? default_status_ : it->second;
}

StatusMapUrlChecker StatusMapUrlChecker::load(const std::string& path) {
  const auto doc = read_json_file(path);
  std::map<std::string, int> statuses;
  if (doc.contains("statuses")) {
    for (const auto& [url, status] : doc.at("statuses").items()) statuses[url] = status.get<int>();
  }
  return StatusMapUrlChecker(std::move(statuses), doc.value("default", 200));
}

int HttpUrlChecker::status(const std::string& url) const { return http::get(url).status; }

std::string_view to_string(Rating r) {
  switch (r) {
    case Rating::bad: return "bad";
    case Rating::sufficient: return "sufficient";
    case Rating::good: return "good";
    case Rating::excellent: return "excellent";
  }
  return "?";
}

Rating rate(int total, const RatingThresholds& t) {
  if (total >= t.excellent_min) return Rating::excellent;
  if (total >= t.good_min) return Rating::good;
  if (total >= t.sufficient_min) return Rating::sufficient;
  return Rating::bad;
}

std::vector<std::string> dataset_iris(const dcat::Graph& g) {
  std::vector<std::string> out;
  for (const auto& t : g.subjects(Term::iri(dcat::expand("rdf:type")), Term::iri(dcat::expand("dcat:Dataset")))) {
    if (t.is_iri()) out.push_back(t.value);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ScoreReport score_dataset(const dcat::Graph& g, const std::string& dataset_iri, const MqaConfig& config,
                          const UrlChecker& urls) {
  const auto node = Term::iri(dataset_iri);
  if (!g.contains({node, Term::iri(dcat::expand("rdf:type")), Term::iri(dcat::expand("dcat:Dataset"))})) {
    throw Error(Errc::not_found, "dataset <" + dataset_iri + "> is not in the graph");
  }
  Evaluator eval(g, node, config, urls);
  ScoreReport report;
  report.dataset = dataset_iri;
  for (const auto& [d, name] : kDimensions) report.per_dimension[d] = 0;
  for (const auto& ind : config.indicators) {
    IndicatorResult r{ind.id, ind.dimension, ind.weight, eval.passes(ind), 0};
    r.points = r.passed ? ind.weight : 0;
    report.per_dimension[ind.dimension] += r.points;
    report.total += r.points;
    report.per_indicator.push_back(std::move(r));
  }
  report.max_possible = config.max_possible();
  report.rating = rate(report.total, config.thresholds);
  return report;
}

Json ScoreReport::to_json() const {
  Json indicators = Json::array();
  for (const auto& r : per_indicator) {
    indicators.push_back(Json{{"indicatorId", r.id},
                              {"dimension", to_string(r.dimension)},
                              {"weight", r.weight},
                              {"passed", r.passed},
                              {"pointsAwarded", r.points}});
  }
  Json dims = Json::object();
  for (const auto& [d, points] : per_dimension) dims[std::string(to_string(d))] = points;
  return Json{{"dataset", dataset},   {"perIndicator", indicators},       {"perDimension", dims},
              {"total", total},       {"maxPossible", max_possible}, {"rating", to_string(rating)}};
}

std::string ScoreReport::to_table() const {
  std::ostringstream out;
  out << "dataset " << dataset << "\n";
  char line[160];
  for (const auto& r : per_indicator) {
    std::snprintf(line, sizeof line, "  %-26s %-17s %4d / %-4d %s\n", r.id.c_str(),
                  std::string(to_string(r.dimension)).c_str(), r.points, r.weight, r.passed ? "pass" : "fail");
    out << line;
  }
  for (const auto& [d, points] : per_dimension) {
    std::snprintf(line, sizeof line, "  %-44s %4d\n", std::string(to_string(d)).c_str(), points);
    out << line;
  }
  out << "  total " << total << " / " << max_possible << " -> " << to_string(rating) << "\n";
  return out.str();
}

DistributionReport score_catalog(const std::vector<Rating>& ratings) {
  DistributionReport out;
  out.total = ratings.size();
  for (auto r : {Rating::excellent, Rating::good, Rating::sufficient, Rating::bad}) out.counts[r] = 0;
  for (auto r : ratings) ++out.counts[r];
  for (const auto& [r, count] : out.counts) out.percentages[r] = rounded_percentage(count, out.total);
  return out;
}

DistributionReport score_catalog(const std::vector<ScoreReport>& reports) {
  std::vector<Rating> ratings;
  ratings.reserve(reports.size());
  for (const auto& r : reports) ratings.push_back(r.rating);
  return score_catalog(ratings);
}

Json DistributionReport::to_json() const {
  Json counts_json = Json::object(), pct = Json::object();
  for (auto r : {Rating::excellent, Rating::good, Rating::sufficient, Rating::bad}) {
    counts_json[std::string(to_string(r))] = counts.at(r);
    pct[std::string(to_string(r))] = percentages.at(r);
  }
  return Json{{"total", total}, {"counts", counts_json}, {"percentages", pct}};
}

}  // namespace lodbridge::mqa
