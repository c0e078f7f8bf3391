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

#include "lodbridge/harvester/store.hpp"

#include <algorithm>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::harvester {

namespace fs = std::filesystem;

Json to_json(const SourcePortal& s) {
  Json out{{"id", s.id}, {"endpoint", s.endpoint}, {"format", s.format == dcat::Format::turtle ? "turtle" : "rdfxml"}};
  if (s.last_harvest) out["lastHarvest"] = format_utc(*s.last_harvest);
  return out;
}

SourcePortal source_from_json(const Json& doc) {
  SourcePortal s;
  try {
    s.id = doc.at("id").get<std::string>();
    s.endpoint = doc.at("endpoint").get<std::string>();
    const auto format = doc.value("format", "rdfxml");
    auto f = dcat::format_from_name(format);
    if (!f) throw Error(Errc::validation, "source " + s.id + ": unknown format '" + format + "'");
    s.format = *f;
    if (doc.contains("lastHarvest")) s.last_harvest = parse_timestamp(doc.at("lastHarvest").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad source entry: ") + e.what());
  }
  return s;
}

std::vector<SourcePortal> load_sources(const std::string& path) {
  const auto doc = read_json_file(path);
  if (!doc.is_array()) throw Error(Errc::validation, path + ": expected a list of sources");
  std::vector<SourcePortal> out;
  for (const auto& item : doc) out.push_back(source_from_json(item));
  return out;
}

Json HarvestReport::to_json() const {
  Json out{{"source", source_id}, {"ok", ok}, {"datasetsAdded", added}, {"datasetsUpdated", updated},
           {"datasetsRemoved", removed}};
  if (!error.empty()) out["error"] = error;
  return out;
}

std::vector<std::string> dataset_iris(const dcat::Graph& g) {
  std::vector<std::string> out;
  const auto type = dcat::Term::iri(dcat::expand("rdf:type"));
  for (const auto& s : g.subjects(type, dcat::Term::iri(dcat::expand("dcat:Dataset")))) {
    if (s.is_iri()) out.push_back(s.value);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

dcat::Graph scope_blanks(const dcat::Graph& g, const std::string& source_id) {
  dcat::Graph out;
  auto scoped = [&](const dcat::Term& t) {
    return t.is_blank() ? dcat::Term::blank(source_id + "_" + t.value) : t;
  };
  for (const auto& t : g) out.add(scoped(t.subject), t.predicate, scoped(t.object));
  return out;
}

std::set<dcat::Triple> description_of(const dcat::Graph& g, const std::string& iri) {
  std::set<dcat::Triple> out;
  for (const auto& t : g.match(dcat::Term::iri(iri), std::nullopt, std::nullopt)) out.insert(t);
  return out;
}

}  // namespace

NamedGraphStore::NamedGraphStore(std::optional<fs::path> dir, std::shared_ptr<Clock> clock)
    : dir_(std::move(dir)), clock_(std::move(clock)) {
  if (dir_) {
    fs::create_directories(*dir_ / "graphs");
    load();
  }
}

Fetcher NamedGraphStore::default_fetcher() {
  return [](const std::string& url) { return http::get(url); };
}

void NamedGraphStore::load() {
  if (fs::exists(*dir_ / "sources.json")) {
    for (auto& s : load_sources((*dir_ / "sources.json").string())) sources_[s.id] = s;
  }
  if (fs::exists(*dir_ / "provenance.json")) {
    const auto doc = read_json_file((*dir_ / "provenance.json").string());
    for (const auto& [id, p] : doc.items()) {
      provenance_[id] = Provenance{p.at("endpoint").get<std::string>(),
                                   parse_timestamp(p.at("harvestedAt").get<std::string>()),
                                   p.at("datasetCount").get<std::size_t>()};
      const auto path = *dir_ / "graphs" / (id + ".ttl");
      graphs_[id] = std::make_shared<const dcat::Graph>(
          scope_blanks(dcat::parse_turtle(read_text_file(path.string())), id));
    }
  }
}

void NamedGraphStore::save_sources() const {
  if (!dir_) return;
  Json list = Json::array();
  for (const auto& [id, s] : sources_) list.push_back(to_json(s));
  write_text_file((*dir_ / "sources.json").string(), list.dump(2) + "\n");
}

void NamedGraphStore::save_provenance() const {
  if (!dir_) return;
  Json doc = Json::object();
  for (const auto& [id, p] : provenance_) {
    doc[id] = Json{{"endpoint", p.endpoint}, {"harvestedAt", format_utc(p.harvested_at)},
                   {"datasetCount", p.dataset_count}};
  }
  write_text_file((*dir_ / "provenance.json").string(), doc.dump(2) + "\n");
}

void NamedGraphStore::add_source(const SourcePortal& source) {
  if (!text::is_valid_slug(source.id)) throw Error(Errc::validation, "source id '" + source.id + "' is not a slug");
  if (!http::is_absolute_url(source.endpoint)) {
    throw Error(Errc::validation, "source " + source.id + ": endpoint must be absolute");
  }
  std::unique_lock lock(mu_);
  sources_[source.id] = source;
  save_sources();
}

std::vector<SourcePortal> NamedGraphStore::sources() const {
  std::shared_lock lock(mu_);
  std::vector<SourcePortal> out;
  for (const auto& [id, s] : sources_) out.push_back(s);
  return out;
}

std::mutex& NamedGraphStore::source_lock(const std::string& id) {
  std::lock_guard lock(locks_mu_);
  auto& slot = source_locks_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

HarvestReport NamedGraphStore::harvest(const std::string& source_id, const Fetcher& fetch) {
  SourcePortal source;
  {
    std::shared_lock lock(mu_);
    auto it = sources_.find(source_id);
    if (it == sources_.end()) throw Error(Errc::not_found, "source '" + source_id + "' is not registered");
    source = it->second;
  }
  std::lock_guard per_source(source_lock(source_id));
  HarvestReport failed{source_id, false, 0, 0, 0, {}};
  const auto res = fetch(source.endpoint);
  if (!res.ok()) {
    failed.error = res.status == 0 ? "fetch failed: no response"
                                   : "fetch failed: HTTP " + std::to_string(res.status);
    return failed;
  }
  dcat::Graph parsed;
  try {
    parsed = dcat::parse(res.body, source.format);
  } catch (const Error& e) {
    failed.error = std::string("parse failed: ") + e.what();
    return failed;
  }
  return replace(source_id, parsed);
}

HarvestReport NamedGraphStore::replace(const std::string& source_id, const dcat::Graph& parsed) {
  auto graph = std::make_shared<const dcat::Graph>(scope_blanks(parsed, source_id));
  const auto fresh = dataset_iris(*graph);
  std::unique_lock lock(mu_);
  HarvestReport report{source_id, true, 0, 0, 0, {}};
  auto old_it = graphs_.find(source_id);
  const auto previous = old_it == graphs_.end() ? std::vector<std::string>{} : dataset_iris(*old_it->second);
  for (const auto& iri : fresh) {
    if (!std::binary_search(previous.begin(), previous.end(), iri)) {
      ++report.added;
    } else if (description_of(*old_it->second, iri) != description_of(*graph, iri)) {
      ++report.updated;
    }
  }
  for (const auto& iri : previous) {
    if (!std::binary_search(fresh.begin(), fresh.end(), iri)) ++report.removed;
  }
  const auto now = clock_->now();
  if (dir_) {
    write_text_file((*dir_ / "graphs" / (source_id + ".ttl")).string(), dcat::serialize_turtle(*graph));
  }
  graphs_[source_id] = graph;
  auto src = sources_.find(source_id);
  provenance_[source_id] = Provenance{src == sources_.end() ? std::string() : src->second.endpoint, now,
                                      fresh.size()};
  if (src != sources_.end()) src->second.last_harvest = now;
  save_sources();
  save_provenance();
  return report;
}

std::shared_ptr<const dcat::Graph> NamedGraphStore::graph(const std::string& source_id) const {
  std::shared_lock lock(mu_);
  auto it = graphs_.find(source_id);
  return it == graphs_.end() ? nullptr : it->second;
}

std::map<std::string, Provenance> NamedGraphStore::provenance() const {
  std::shared_lock lock(mu_);
  return provenance_;
}

dcat::Graph NamedGraphStore::union_graph() const {
  std::vector<std::shared_ptr<const dcat::Graph>> snapshot;
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, g] : graphs_) snapshot.push_back(g);
  }
  dcat::Graph out;
  for (const auto& g : snapshot) out.merge(*g);
  return out;
}

}  // namespace lodbridge::harvester
