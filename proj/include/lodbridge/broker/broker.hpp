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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/entity/entity.hpp"
#include "lodbridge/entity/representation.hpp"
#include "lodbridge/entity/templates.hpp"

namespace lodbridge::broker {

using entity::Entity;
using entity::EntityId;
using entity::Fragment;
using entity::Representation;

struct Subscription {
  std::string id;                               // URN; minted when empty
  std::vector<std::string> entity_types;        // empty = all
  std::vector<std::string> watched_attributes;  // empty = all
  std::string endpoint;
  bool active = true;
  Timestamp created_at{};
  Representation format = Representation::normalized;

  /// Type matches (or no filter) and the changed set hits a watched
  /// attribute (or nothing is watched).
  bool matches(const std::string& type, const std::vector<std::string>& changed) const;
};

Json to_json(const Subscription& sub);
Subscription subscription_from_json(const Json& doc);

struct Notification {
  std::string subscription_id;
  std::string endpoint;
  Timestamp notified_at{};
  std::vector<Json> data;
  int attempt = 1;
  /// Store version that produced this notification.
  std::uint64_t commit_seq = 0;
};

/// Wire body: `{subscriptionId, notifiedAt, data:[...]}`.
Json notification_body(const Notification& n);

class NotificationSender {
 public:
  virtual ~NotificationSender() = default;
  /// True when the endpoint accepted the notification (2xx).
  virtual bool deliver(const std::string& endpoint, const std::string& body) = 0;
};

class HttpNotificationSender final : public NotificationSender {
 public:
  bool deliver(const std::string& endpoint, const std::string& body) override;
};

struct DeliveryReport {
  std::size_t attempted = 0;
  std::size_t delivered = 0;
  std::size_t retried = 0;
  std::size_t dead_lettered = 0;
};

enum class CompareOp { eq, lt, gt };

struct AttrPredicate {
  std::string attribute;
  CompareOp op = CompareOp::eq;
  Json literal;

  bool matches(const Entity& e) const;
  std::string to_string() const;
};

/// Parses `attr==v`, `attr<v`, `attr>v`. The literal is read as JSON when
/// possible, otherwise as a bare string.
AttrPredicate parse_predicate(std::string_view text);

struct EntityQuery {
  std::optional<std::string> type;
  std::optional<AttrPredicate> predicate;
  std::size_t limit = 1000;
};

struct BrokerConfig {
  int max_attempts = 5;
  std::chrono::milliseconds backoff_base{100};
  std::chrono::milliseconds backoff_cap{10000};
  /// When set, entities of a type with a template must validate cleanly.
  const entity::TemplateRegistry* templates = nullptr;
};

/// In-memory NGSI-LD entity store with subscriptions. All writes take the
/// state lock exclusively, so per-entity updates serialize and a
/// notification is queued in the same critical section as its write.
class Broker {
 public:
  Broker(BrokerConfig config, std::shared_ptr<Clock> clock,
         std::shared_ptr<NotificationSender> sender);
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  EntityId create_entity(Entity e);
  Entity get_entity(const EntityId& id) const;
  Json get_document(const EntityId& id, Representation representation) const;
  std::vector<Entity> query_entities(const EntityQuery& query) const;
  Entity update_attrs(const EntityId& id, const Fragment& fragment);
  void delete_entity(const EntityId& id);
  std::size_t entity_count() const;

  std::string create_subscription(Subscription sub);
  Subscription get_subscription(const std::string& id) const;
  void delete_subscription(const std::string& id);
  std::vector<Subscription> subscriptions() const;

  /// One delivery round: every queued notification (or only those whose
  /// backoff has elapsed by `due_before`) is attempted once. Failures are
  /// re-queued with attempt+1 until max_attempts, then dead-lettered.
  DeliveryReport dispatch_pending(
      std::optional<std::chrono::steady_clock::time_point> due_before = std::nullopt);

  std::size_t pending_count() const;
  std::vector<Notification> dead_letters() const;
  std::uint64_t commit_seq() const;

  /// Background delivery loop honoring backoff.
  void start_dispatcher();
  void stop_dispatcher();

  /// Waits until nothing is queued or in flight.
  bool wait_idle(std::chrono::milliseconds timeout);

  void save_snapshot(const std::string& path) const;
  void load_snapshot(const std::string& path);

  const BrokerConfig& config() const { return config_; }

 private:
  struct Pending {
    Notification notification;
    std::chrono::steady_clock::time_point due;
  };

  void check_template(const Entity& e) const;
  void enqueue_locked(const Entity& e, const std::vector<std::string>& changed);
  std::chrono::milliseconds backoff_for(int attempt) const;
  void dispatcher_loop();

  BrokerConfig config_;
  std::shared_ptr<Clock> clock_;
  std::shared_ptr<NotificationSender> sender_;

  mutable std::shared_mutex mu_;
  std::condition_variable_any wake_;
  std::map<EntityId, Entity> entities_;
  std::map<std::string, Subscription> subscriptions_;
  std::deque<Pending> queue_;
  std::vector<Notification> dead_letters_;
  std::size_t in_flight_ = 0;
  std::uint64_t commit_seq_ = 0;
  std::uint64_t next_subscription_ = 1;

  std::thread dispatcher_;
  bool stopping_ = false;
};

/// Client-side view of a broker, either in-process or over HTTP.
class BrokerApi {
 public:
  virtual ~BrokerApi() = default;
  virtual void create(const Entity& e) = 0;
  virtual std::optional<Entity> get(const EntityId& id) = 0;
  virtual void update(const EntityId& id, const Fragment& fragment) = 0;
  virtual std::vector<Entity> query(const EntityQuery& query) = 0;
  virtual std::string subscribe(const Subscription& sub) = 0;

  /// Creates the entity, or patches every attribute when it already
  /// exists. Returns true if it was created.
  bool upsert(const Entity& e);
};

class LocalBrokerClient final : public BrokerApi {
 public:
  explicit LocalBrokerClient(Broker& broker) : broker_(broker) {}
  void create(const Entity& e) override;
  std::optional<Entity> get(const EntityId& id) override;
  void update(const EntityId& id, const Fragment& fragment) override;
  std::vector<Entity> query(const EntityQuery& query) override;
  std::string subscribe(const Subscription& sub) override;

 private:
  Broker& broker_;
};

class HttpBrokerClient final : public BrokerApi {
 public:
  explicit HttpBrokerClient(std::string base_url);
  void create(const Entity& e) override;
  std::optional<Entity> get(const EntityId& id) override;
  void update(const EntityId& id, const Fragment& fragment) override;
  std::vector<Entity> query(const EntityQuery& query) override;
  std::string subscribe(const Subscription& sub) override;

 private:
  std::string base_url_;
};

}  // namespace lodbridge::broker
