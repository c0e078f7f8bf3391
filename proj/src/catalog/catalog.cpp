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

#include "lodbridge/catalog/catalog.hpp"

#include <algorithm>
#include <mutex>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::catalog {

namespace fs = std::filesystem;

std::size_t match_count(const DatasetRecord& ds, const std::string& free_text) {
  std::size_t n = 0;
  if (text::contains_case_insensitive(ds.title, free_text)) ++n;
  if (text::contains_case_insensitive(ds.description, free_text)) ++n;
  for (const auto& tag : ds.tags) {
    if (text::contains_case_insensitive(tag, free_text)) ++n;
  }
  return n;
}

bool matches(const DatasetRecord& ds, const SearchQuery& query) {
  if (query.free_text && !query.free_text->empty() && match_count(ds, *query.free_text) == 0) return false;
  for (const auto& wanted : query.tags) {
    const bool found = std::any_of(ds.tags.begin(), ds.tags.end(), [&](const std::string& t) {
      return text::to_lower(t) == text::to_lower(wanted);
    });
    if (!found) return false;
  }
  if (query.organization && ds.organization_id != *query.organization) return false;
  if (query.format) {
    const bool found = std::any_of(ds.resources.begin(), ds.resources.end(), [&](const Resource& r) {
      return text::to_lower(r.format) == text::to_lower(*query.format);
    });
    if (!found) return false;
  }
  return true;
}

namespace {

void check_slug(const std::string& id, const char* what) {
  if (!text::is_valid_slug(id)) {
    throw Error(Errc::validation, std::string(what) + " id '" + id + "' is not a valid slug");
  }
}

void check_resource(const Resource& r) {
  check_slug(r.id, "resource");
  if (!http::is_absolute_url(r.access_url)) {
    throw Error(Errc::validation, "resource '" + r.id + "' accessURL must be absolute");
  }
}

bool same_metadata(const DatasetRecord& a, const DatasetRecord& b) {
  return a.title == b.title && a.description == b.description && a.tags == b.tags &&
         a.license_id == b.license_id && a.themes == b.themes;
}

}  // namespace

Catalog::Catalog(std::optional<fs::path> data_dir, std::shared_ptr<Clock> clock)
    : dir_(std::move(data_dir)), clock_(std::move(clock)) {
  if (dir_) {
    fs::create_directories(*dir_ / "organizations");
    fs::create_directories(*dir_ / "datasets");
    load();
  }
}

void Catalog::load() {
  for (const auto& entry : fs::directory_iterator(*dir_ / "organizations")) {
    if (entry.path().extension() != ".json") continue;
    auto org = organization_from_json(read_json_file(entry.path().string()));
    orgs_[org.id] = std::move(org);
  }
  for (const auto& entry : fs::directory_iterator(*dir_ / "datasets")) {
    if (entry.path().extension() != ".json") continue;
    auto ds = dataset_from_json(read_json_file(entry.path().string()));
    datasets_[ds.id] = std::move(ds);
  }
}

void Catalog::persist(const Organization& org) const {
  if (dir_) write_text_file((*dir_ / "organizations" / (org.id + ".json")).string(), to_json(org).dump(2) + "\n");
}

void Catalog::persist(const DatasetRecord& ds) const {
  if (dir_) write_text_file((*dir_ / "datasets" / (ds.id + ".json")).string(), to_json(ds).dump(2) + "\n");
}

void Catalog::unpersist(const std::string& kind, const std::string& id) const {
  if (dir_) fs::remove(*dir_ / kind / (id + ".json"));
}

std::string Catalog::create_organization(const Organization& org) {
  check_slug(org.id, "organization");
  std::unique_lock lock(mu_);
  if (orgs_.count(org.id)) throw Error(Errc::conflict, "organization '" + org.id + "' already exists");
  persist(org);
  orgs_[org.id] = org;
  return org.id;
}

std::optional<Organization> Catalog::find_organization(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = orgs_.find(id);
  if (it == orgs_.end()) return std::nullopt;
  return it->second;
}

Organization Catalog::get_organization(const std::string& id) const {
  auto org = find_organization(id);
  if (!org) throw Error(Errc::not_found, "organization '" + id + "' not found");
  return *org;
}

std::vector<Organization> Catalog::organizations() const {
  std::shared_lock lock(mu_);
  std::vector<Organization> out;
  for (const auto& [id, org] : orgs_) out.push_back(org);
  return out;
}

void Catalog::delete_organization(const std::string& id) {
  std::unique_lock lock(mu_);
  if (!orgs_.count(id)) throw Error(Errc::not_found, "organization '" + id + "' not found");
  for (const auto& [ds_id, ds] : datasets_) {
    if (ds.organization_id == id) {
      throw Error(Errc::conflict, "organization '" + id + "' still owns dataset '" + ds_id + "'");
    }
  }
  unpersist("organizations", id);
  orgs_.erase(id);
}

std::string Catalog::create_dataset(DatasetRecord ds) {
  if (ds.title.empty()) throw Error(Errc::validation, "dataset title must not be empty");
  if (ds.id.empty()) ds.id = text::slugify(ds.title);
  check_slug(ds.id, "dataset");
  for (auto& r : ds.resources) {
    if (r.id.empty()) r.id = text::slugify(r.title);
    check_resource(r);
  }
  std::unique_lock lock(mu_);
  if (datasets_.count(ds.id)) throw Error(Errc::conflict, "dataset '" + ds.id + "' already exists");
  if (!orgs_.count(ds.organization_id)) {
    throw Error(Errc::not_found, "organization '" + ds.organization_id + "' not found");
  }
  ds.issued = ds.modified = clock_->now();
  persist(ds);
  datasets_[ds.id] = ds;
  return ds.id;
}

DatasetRecord Catalog::update_dataset(const DatasetRecord& metadata) {
  if (metadata.title.empty()) throw Error(Errc::validation, "dataset title must not be empty");
  std::unique_lock lock(mu_);
  auto it = datasets_.find(metadata.id);
  if (it == datasets_.end()) throw Error(Errc::not_found, "dataset '" + metadata.id + "' not found");
  if (same_metadata(it->second, metadata)) return it->second;
  DatasetRecord next = it->second;
  next.title = metadata.title;
  next.description = metadata.description;
  next.tags = metadata.tags;
  next.license_id = metadata.license_id;
  next.themes = metadata.themes;
  next.modified = std::max(clock_->now(), next.issued);
  persist(next);
  it->second = next;
  return next;
}

std::optional<DatasetRecord> Catalog::find_dataset(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = datasets_.find(id);
  if (it == datasets_.end()) return std::nullopt;
  return it->second;
}

DatasetRecord Catalog::get_dataset(const std::string& id) const {
  auto ds = find_dataset(id);
  if (!ds) throw Error(Errc::not_found, "dataset '" + id + "' not found");
  return *ds;
}

std::vector<DatasetRecord> Catalog::datasets() const {
  std::shared_lock lock(mu_);
  std::vector<DatasetRecord> out;
  for (const auto& [id, ds] : datasets_) out.push_back(ds);
  return out;
}

void Catalog::delete_dataset(const std::string& id) {
  std::unique_lock lock(mu_);
  if (!datasets_.erase(id)) throw Error(Errc::not_found, "dataset '" + id + "' not found");
  unpersist("datasets", id);
}

std::string Catalog::upsert_resource(const std::string& dataset_id, Resource res) {
  if (res.id.empty()) res.id = text::slugify(res.title);
  check_resource(res);
  std::unique_lock lock(mu_);
  auto it = datasets_.find(dataset_id);
  if (it == datasets_.end()) throw Error(Errc::not_found, "dataset '" + dataset_id + "' not found");
  DatasetRecord next = it->second;
  auto existing = std::find_if(next.resources.begin(), next.resources.end(),
                               [&](const Resource& r) { return r.id == res.id; });
  if (existing != next.resources.end()) {
    if (*existing == res) return res.id;
    *existing = res;
  } else {
    next.resources.push_back(res);
  }
  next.modified = std::max(clock_->now(), next.issued);
  persist(next);
  it->second = std::move(next);
  return res.id;
}

std::vector<DatasetRecord> Catalog::search(const SearchQuery& query, std::size_t limit) const {
  if (limit < 1) throw Error(Errc::invalid_argument, "limit must be at least 1");
  std::vector<std::pair<std::size_t, const DatasetRecord*>> hits;
  std::shared_lock lock(mu_);
  for (const auto& [id, ds] : datasets_) {
    if (!matches(ds, query)) continue;
    const std::size_t score = query.free_text ? match_count(ds, *query.free_text) : 0;
    hits.emplace_back(score, &ds);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second->id < b.second->id;
  });
  std::vector<DatasetRecord> out;
  for (std::size_t i = 0; i < hits.size() && i < limit; ++i) out.push_back(*hits[i].second);
  return out;
}

}  // namespace lodbridge::catalog
