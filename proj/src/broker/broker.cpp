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

#include "lodbridge/broker/broker.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <mutex>

#include <spdlog/spdlog.h>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"

namespace lodbridge::broker {

using namespace std::chrono;

bool Subscription::matches(const std::string& type, const std::vector<std::string>& changed) const {
  if (!active) return false;
  if (!entity_types.empty() &&
      std::find(entity_types.begin(), entity_types.end(), type) == entity_types.end()) {
    return false;
  }
  if (watched_attributes.empty()) return true;
  return std::any_of(changed.begin(), changed.end(), [&](const std::string& name) {
    return std::find(watched_attributes.begin(), watched_attributes.end(), name) !=
           watched_attributes.end();
  });
}

Json to_json(const Subscription& sub) {
  Json doc = Json::object();
  doc["id"] = sub.id;
  doc["type"] = "Subscription";
  Json entities = Json::array();
  for (const auto& type : sub.entity_types) entities.push_back(Json{{"type", type}});
  if (!entities.empty()) doc["entities"] = entities;
  if (!sub.watched_attributes.empty()) doc["watchedAttributes"] = sub.watched_attributes;
  doc["notification"] = Json{
      {"endpoint", Json{{"uri", sub.endpoint}, {"accept", "application/json"}}},
      {"format", sub.format == Representation::key_values ? "keyValues" : "normalized"}};
  doc["isActive"] = sub.active;
  doc["createdAt"] = format_utc(sub.created_at);
  return doc;
}

Subscription subscription_from_json(const Json& doc) {
  if (!doc.is_object()) throw Error(Errc::malformed, "subscription must be an object");
  Subscription sub;
  sub.id = doc.value("id", "");
  if (auto it = doc.find("entities"); it != doc.end()) {
    for (const auto& item : *it) {
      if (!item.contains("type")) throw Error(Errc::malformed, "entities[] needs a type");
      sub.entity_types.push_back(item["type"].get<std::string>());
    }
  }
  if (auto it = doc.find("watchedAttributes"); it != doc.end()) {
    sub.watched_attributes = it->get<std::vector<std::string>>();
  }
  const auto notification = doc.find("notification");
  if (notification == doc.end() || !notification->contains("endpoint")) {
    throw Error(Errc::malformed, "subscription needs notification.endpoint");
  }
  const auto& endpoint = (*notification)["endpoint"];
  sub.endpoint = endpoint.is_string() ? endpoint.get<std::string>() : endpoint.value("uri", "");
  sub.format = notification->value("format", "normalized") == "keyValues"
                   ? Representation::key_values
                   : Representation::normalized;
  sub.active = doc.value("isActive", true);
  if (auto it = doc.find("createdAt"); it != doc.end()) {
    sub.created_at = parse_timestamp(it->get<std::string>());
  }
  return sub;
}

Json notification_body(const Notification& n) {
  Json body = Json::object();
  body["subscriptionId"] = n.subscription_id;
  body["notifiedAt"] = format_utc(n.notified_at);
  body["data"] = n.data;
  return body;
}

bool HttpNotificationSender::deliver(const std::string& endpoint, const std::string& body) {
  return http::post(endpoint, body).ok();
}

namespace {

// Numbers compare numerically, strings lexicographically; mixed types never
// satisfy < or >.
bool compare(const Json& value, CompareOp op, const Json& literal) {
  if (op == CompareOp::eq) return normalize_numbers(value) == normalize_numbers(literal);
  if (value.is_number() && literal.is_number()) {
    const double a = value.get<double>();
    const double b = literal.get<double>();
    return op == CompareOp::lt ? a < b : a > b;
  }
  if (value.is_string() && literal.is_string()) {
    return op == CompareOp::lt ? value.get<std::string>() < literal.get<std::string>()
                               : value.get<std::string>() > literal.get<std::string>();
  }
  return false;
}

}  // namespace

bool AttrPredicate::matches(const Entity& e) const {
  const auto* found = e.find(attribute);
  return found != nullptr && compare(found->value, op, literal);
}

std::string AttrPredicate::to_string() const {
  const char* symbol = op == CompareOp::eq ? "==" : op == CompareOp::lt ? "<" : ">";
  return attribute + symbol + dump_compact(literal);
}

AttrPredicate parse_predicate(std::string_view text) {
  AttrPredicate predicate;
  std::size_t pos = text.find_first_of("=<>");
  if (pos == std::string_view::npos || pos == 0) {
    throw Error(Errc::invalid_argument, "malformed predicate: " + std::string(text));
  }
  predicate.attribute = std::string(text.substr(0, pos));
  std::string_view rest;
  if (text.substr(pos, 2) == "==") {
    predicate.op = CompareOp::eq;
    rest = text.substr(pos + 2);
  } else if (text[pos] == '<') {
    predicate.op = CompareOp::lt;
    rest = text.substr(pos + 1);
  } else if (text[pos] == '>') {
    predicate.op = CompareOp::gt;
    rest = text.substr(pos + 1);
  } else {
    throw Error(Errc::invalid_argument, "malformed predicate: " + std::string(text));
  }
  if (rest.empty()) throw Error(Errc::invalid_argument, "predicate has no literal: " + std::string(text));
  for (char c : predicate.attribute) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) {
      throw Error(Errc::invalid_argument, "malformed attribute in predicate: " + predicate.attribute);
    }
  }
  try {
    predicate.literal = normalize_numbers(Json::parse(rest));
  } catch (const nlohmann::json::parse_error&) {
    predicate.literal = std::string(rest);
  }
  return predicate;
}

Broker::Broker(BrokerConfig config, std::shared_ptr<Clock> clock,
               std::shared_ptr<NotificationSender> sender)
    : config_(config), clock_(std::move(clock)), sender_(std::move(sender)) {
  if (config_.max_attempts < 1) throw Error(Errc::invalid_argument, "max_attempts must be >= 1");
  if (!clock_) clock_ = system_clock();
  if (!sender_) sender_ = std::make_shared<HttpNotificationSender>();
}

Broker::~Broker() { stop_dispatcher(); }

void Broker::check_template(const Entity& e) const {
  if (config_.templates == nullptr) return;
  const auto* model = config_.templates->find(e.type());
  if (model == nullptr) return;
  const auto report = entity::validate_entity(e, *model);
  if (!report.ok()) {
    const auto& f = report.findings.front();
    throw Error(Errc::validation, e.id().str() + ": " + f.attribute + " " +
                                      std::string(entity::to_string(f.violation)));
  }
}

void Broker::enqueue_locked(const Entity& e, const std::vector<std::string>& changed) {
  const auto now = clock_->now();
  const auto due = steady_clock::now();
  bool queued = false;
  for (const auto& [id, sub] : subscriptions_) {
    if (!sub.matches(e.type(), changed)) continue;
    Notification n;
    n.subscription_id = id;
    n.endpoint = sub.endpoint;
    n.notified_at = now;
    n.data.push_back(entity::to_document(e, sub.format));
    n.commit_seq = commit_seq_;
    queue_.push_back({std::move(n), due});
    queued = true;
  }
  if (queued) wake_.notify_all();
}

EntityId Broker::create_entity(Entity e) {
  check_template(e);
  std::unique_lock lock(mu_);
  if (entities_.count(e.id())) throw Error(Errc::conflict, "entity already exists: " + e.id().str());
  std::vector<std::string> changed;
  for (const auto& a : e.attributes()) changed.push_back(a.name);
  const auto id = e.id();
  auto [it, inserted] = entities_.emplace(id, std::move(e));
  ++commit_seq_;
  enqueue_locked(it->second, changed);
  return id;
}

Entity Broker::get_entity(const EntityId& id) const {
  std::shared_lock lock(mu_);
  auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(Errc::not_found, "entity not found: " + id.str());
  return it->second;
}

Json Broker::get_document(const EntityId& id, Representation representation) const {
  return entity::to_document(get_entity(id), representation);
}

std::vector<Entity> Broker::query_entities(const EntityQuery& query) const {
  if (query.limit < 1) throw Error(Errc::invalid_argument, "limit must be >= 1");
  std::vector<Entity> out;
  std::shared_lock lock(mu_);
  // std::map keeps ids in lexicographic order.
  for (const auto& [id, e] : entities_) {
    if (out.size() >= query.limit) break;
    if (query.type && e.type() != *query.type) continue;
    if (query.predicate && !query.predicate->matches(e)) continue;
    out.push_back(e);
  }
  return out;
}

Entity Broker::update_attrs(const EntityId& id, const Fragment& fragment) {
  std::unique_lock lock(mu_);
  auto it = entities_.find(id);
  if (it == entities_.end()) throw Error(Errc::not_found, "entity not found: " + id.str());
  const auto changed = entity::changed_attributes(it->second, fragment);
  Entity merged = entity::merge_update(it->second, fragment);
  check_template(merged);
  if (changed.empty()) return merged;
  it->second = std::move(merged);
  ++commit_seq_;
  enqueue_locked(it->second, changed);
  return it->second;
}

void Broker::delete_entity(const EntityId& id) {
  std::unique_lock lock(mu_);
  if (entities_.erase(id) == 0) throw Error(Errc::not_found, "entity not found: " + id.str());
  ++commit_seq_;
}

std::size_t Broker::entity_count() const {
  std::shared_lock lock(mu_);
  return entities_.size();
}

std::string Broker::create_subscription(Subscription sub) {
  if (!http::is_absolute_url(sub.endpoint)) {
    throw Error(Errc::invalid_argument, "notification endpoint must be an absolute URL: " + sub.endpoint);
  }
  std::unique_lock lock(mu_);
  if (sub.id.empty()) {
    do {
      sub.id = "urn:ngsi-ld:Subscription:" + std::to_string(next_subscription_++);
    } while (subscriptions_.count(sub.id));
  } else if (!EntityId::is_valid(sub.id)) {
    throw Error(Errc::invalid_argument, "subscription id must be a URN: " + sub.id);
  }
  if (subscriptions_.count(sub.id)) throw Error(Errc::conflict, "subscription exists: " + sub.id);
  sub.created_at = clock_->now();
  const auto id = sub.id;
  subscriptions_.emplace(id, std::move(sub));
  return id;
}

Subscription Broker::get_subscription(const std::string& id) const {
  std::shared_lock lock(mu_);
  auto it = subscriptions_.find(id);
  if (it == subscriptions_.end()) throw Error(Errc::not_found, "subscription not found: " + id);
  return it->second;
}

void Broker::delete_subscription(const std::string& id) {
  std::unique_lock lock(mu_);
  if (subscriptions_.erase(id) == 0) throw Error(Errc::not_found, "subscription not found: " + id);
  std::erase_if(queue_, [&](const Pending& p) { return p.notification.subscription_id == id; });
}

std::vector<Subscription> Broker::subscriptions() const {
  std::shared_lock lock(mu_);
  std::vector<Subscription> out;
  for (const auto& [id, sub] : subscriptions_) out.push_back(sub);
  return out;
}

milliseconds Broker::backoff_for(int attempt) const {
  auto delay = config_.backoff_base;
  for (int i = 1; i < attempt && delay < config_.backoff_cap; ++i) delay *= 2;
  return std::min(delay, config_.backoff_cap);
}

DeliveryReport Broker::dispatch_pending(std::optional<steady_clock::time_point> due_before) {
  std::vector<Pending> batch;
  {
    std::unique_lock lock(mu_);
    std::deque<Pending> keep;
    for (auto& p : queue_) {
      if (!due_before || p.due <= *due_before) {
        batch.push_back(std::move(p));
      } else {
        keep.push_back(std::move(p));
      }
    }
    queue_ = std::move(keep);
    in_flight_ += batch.size();
  }

  DeliveryReport report;
  for (auto& p : batch) {
    ++report.attempted;
    const auto body = dump_compact(notification_body(p.notification));
    bool ok = false;
    try {
      ok = sender_->deliver(p.notification.endpoint, body);
    } catch (const std::exception& e) {
      spdlog::warn("delivery to {} threw: {}", p.notification.endpoint, e.what());
    }
    std::unique_lock lock(mu_);
    --in_flight_;
    if (ok) {
      ++report.delivered;
    } else if (p.notification.attempt >= config_.max_attempts) {
      ++report.dead_lettered;
      spdlog::warn("dead-lettering notification for {} after {} attempts",
                   p.notification.subscription_id, p.notification.attempt);
      dead_letters_.push_back(std::move(p.notification));
    } else if (subscriptions_.count(p.notification.subscription_id)) {
      ++report.retried;
      p.due = steady_clock::now() + backoff_for(p.notification.attempt);
      ++p.notification.attempt;
      queue_.push_back(std::move(p));
    }
  }
  wake_.notify_all();
  return report;
}

std::size_t Broker::pending_count() const {
  std::shared_lock lock(mu_);
  return queue_.size();
}

std::vector<Notification> Broker::dead_letters() const {
  std::shared_lock lock(mu_);
  return dead_letters_;
}

std::uint64_t Broker::commit_seq() const {
  std::shared_lock lock(mu_);
  return commit_seq_;
}

void Broker::start_dispatcher() {
  std::unique_lock lock(mu_);
  if (dispatcher_.joinable()) return;
  stopping_ = false;
  dispatcher_ = std::thread([this] { dispatcher_loop(); });
}

void Broker::stop_dispatcher() {
  {
    std::unique_lock lock(mu_);
    if (!dispatcher_.joinable()) return;
    stopping_ = true;
  }
  wake_.notify_all();
  dispatcher_.join();
}

void Broker::dispatcher_loop() {
  for (;;) {
    {
      std::unique_lock lock(mu_);
      if (stopping_) return;
      if (queue_.empty()) {
        wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (stopping_) return;
      }
      const auto next = std::min_element(queue_.begin(), queue_.end(),
                                         [](const Pending& a, const Pending& b) { return a.due < b.due; })
                            ->due;
      if (next > steady_clock::now()) {
        wake_.wait_until(lock, next);
        if (stopping_) return;
        continue;
      }
    }
    dispatch_pending(steady_clock::now());
  }
}

bool Broker::wait_idle(milliseconds timeout) {
  std::unique_lock lock(mu_);
  return wake_.wait_for(lock, timeout, [this] { return queue_.empty() && in_flight_ == 0; });
}

void Broker::save_snapshot(const std::string& path) const {
  Json doc = Json::object();
  Json entities = Json::array();
  Json subs = Json::array();
  {
    std::shared_lock lock(mu_);
    for (const auto& [id, e] : entities_) entities.push_back(entity::to_normalized(e));
    for (const auto& [id, sub] : subscriptions_) subs.push_back(to_json(sub));
  }
  doc["entities"] = std::move(entities);
  doc["subscriptions"] = std::move(subs);
  write_text_file(path, doc.dump(2) + "\n");
}

void Broker::load_snapshot(const std::string& path) {
  if (!std::filesystem::exists(path)) return;
  const Json doc = read_json_file(path);
  std::unique_lock lock(mu_);
  entities_.clear();
  subscriptions_.clear();
  for (const auto& item : doc.value("entities", Json::array())) {
    auto e = entity::from_normalized(item);
    const auto id = e.id();
    entities_.emplace(id, std::move(e));
  }
  for (const auto& item : doc.value("subscriptions", Json::array())) {
    auto sub = subscription_from_json(item);
    const auto id = sub.id;
    subscriptions_.emplace(id, std::move(sub));
  }
}

}  // namespace lodbridge::broker
