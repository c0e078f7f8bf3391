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

#include <gtest/gtest.h>

#include <httplib.h>

#include <deque>
#include <filesystem>
#include <mutex>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/broker/server.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/entity/representation.hpp"
#include "oracles.hpp"

using namespace lodbridge;
using namespace lodbridge::broker;
using entity::Attribute;

namespace {

// Replies with a scripted outcome per delivery, then succeeds.
class ScriptedSender final : public NotificationSender {
 public:
  explicit ScriptedSender(std::deque<bool> script = {}) : script_(std::move(script)) {}

  bool deliver(const std::string& endpoint, const std::string& body) override {
    std::lock_guard lock(mu_);
    bodies.push_back(parse_json(body));
    endpoints.push_back(endpoint);
    if (script_.empty()) return true;
    const bool ok = script_.front();
    script_.pop_front();
    return ok;
  }

  std::vector<Json> bodies;
  std::vector<std::string> endpoints;

 private:
  std::mutex mu_;
  std::deque<bool> script_;
};

class FailingSender final : public NotificationSender {
 public:
  bool deliver(const std::string&, const std::string&) override { return false; }
};

std::shared_ptr<ManualClock> fixed_clock() {
  return std::make_shared<ManualClock>(parse_timestamp("2021-11-10T15:00:00Z"));
}

Entity weather(double temperature = 14.6) {
  Entity e(EntityId("urn:WeatherObserved:Santander"), "WeatherObserved");
  e.set(Attribute::property("dateObserved", "2021-11-10T15:00:00.00Z"));
  e.set(Attribute::property("temperature", temperature, "CEL"));
  return e;
}

Subscription sub_for(std::vector<std::string> types, std::vector<std::string> attrs,
                     std::string endpoint = "http://sink.test/notify") {
  Subscription s;
  s.entity_types = std::move(types);
  s.watched_attributes = std::move(attrs);
  s.endpoint = std::move(endpoint);
  return s;
}

BrokerConfig quick(int attempts = 3) {
  BrokerConfig c;
  c.max_attempts = attempts;
  c.backoff_base = std::chrono::milliseconds(1);
  c.backoff_cap = std::chrono::milliseconds(4);
  return c;
}

}  // namespace

TEST(Subscription, MatchingRules) {
  const auto any = sub_for({}, {});
  EXPECT_TRUE(any.matches("X", {"a"}));
  const auto typed = sub_for({"WeatherObserved"}, {"temperature"});
  EXPECT_TRUE(typed.matches("WeatherObserved", {"precipitation", "temperature"}));
  EXPECT_FALSE(typed.matches("WeatherObserved", {"precipitation"}));
  EXPECT_FALSE(typed.matches("TrafficFlowObserved", {"temperature"}));
}

TEST(Subscription, JsonRoundTrip) {
  auto s = sub_for({"WeatherObserved"}, {"temperature"});
  s.id = "urn:Subscription:7";
  s.format = entity::Representation::key_values;
  s.created_at = parse_timestamp("2021-11-10T15:00:00Z");
  const auto back = subscription_from_json(to_json(s));
  EXPECT_EQ(back.id, s.id);
  EXPECT_EQ(back.entity_types, s.entity_types);
  EXPECT_EQ(back.watched_attributes, s.watched_attributes);
  EXPECT_EQ(back.endpoint, s.endpoint);
  EXPECT_EQ(back.format, s.format);
}

TEST(Predicate, ParseAndMatch) {
  const auto e = weather(14.6);
  EXPECT_TRUE(parse_predicate("temperature>10").matches(e));
  EXPECT_FALSE(parse_predicate("temperature<10").matches(e));
  EXPECT_TRUE(parse_predicate("temperature==14.6").matches(e));
  EXPECT_FALSE(parse_predicate("missing==1").matches(e));
  EXPECT_THROW(parse_predicate("temperature"), Error);
}

TEST(Broker, CreateGetConflictAndNotFound) {
  Broker b(quick(), fixed_clock(), std::make_shared<ScriptedSender>());
  b.create_entity(weather());
  EXPECT_EQ(b.get_entity(EntityId("urn:WeatherObserved:Santander")), weather());
  try {
    b.create_entity(weather());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::conflict);
  }
  try {
    b.get_entity(EntityId("urn:WeatherObserved:Nowhere"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_found);
  }
}

TEST(Broker, UpdateNotifiesMatchingSubscriptionsOnly) {
  auto sender = std::make_shared<ScriptedSender>();
  Broker b(quick(), fixed_clock(), sender);
  const auto hit = b.create_subscription(sub_for({"WeatherObserved"}, {"temperature"}));
  b.create_subscription(sub_for({"WeatherObserved"}, {"precipitation"}));
  b.create_subscription(sub_for({"TrafficFlowObserved"}, {}));
  b.create_entity(weather());
  b.dispatch_pending();
  const auto after_create = sender->bodies.size();
  EXPECT_EQ(after_create, 1u);  // temperature watcher only

  b.update_attrs(EntityId("urn:WeatherObserved:Santander"), {Attribute::property("temperature", 15.1, "CEL")});
  b.dispatch_pending();
  ASSERT_EQ(sender->bodies.size(), after_create + 1);
  const auto& body = sender->bodies.back();
  EXPECT_EQ(body.at("subscriptionId"), hit);
  EXPECT_EQ(body.at("data").at(0).at("temperature").at("value"), 15.1);
  EXPECT_EQ(body.at("notifiedAt"), "2021-11-10T15:00:00.00Z");
}

TEST(Broker, UnchangedUpdateAndDeleteDoNotNotify) {
  auto sender = std::make_shared<ScriptedSender>();
  Broker b(quick(), fixed_clock(), sender);
  b.create_entity(weather());
  b.create_subscription(sub_for({}, {}));
  const auto seq = b.commit_seq();
  b.update_attrs(EntityId("urn:WeatherObserved:Santander"), {*weather().find("temperature")});
  EXPECT_EQ(b.pending_count(), 0u);
  b.delete_entity(EntityId("urn:WeatherObserved:Santander"));
  EXPECT_EQ(b.pending_count(), 0u);
  EXPECT_GT(b.commit_seq(), seq);
  EXPECT_EQ(b.entity_count(), 0u);
}

TEST(Broker, KeyValuesSubscriptionFormat) {
  auto sender = std::make_shared<ScriptedSender>();
  Broker b(quick(), fixed_clock(), sender);
  auto s = sub_for({}, {});
  s.format = entity::Representation::key_values;
  b.create_subscription(s);
  b.create_entity(weather());
  b.dispatch_pending();
  ASSERT_EQ(sender->bodies.size(), 1u);
  EXPECT_EQ(sender->bodies[0].at("data").at(0).at("temperature"), 14.6);
}

TEST(Broker, RetryThenDeliverOnSecondAttempt) {
  auto sender = std::make_shared<ScriptedSender>(std::deque<bool>{false});
  Broker b(quick(3), fixed_clock(), sender);
  b.create_subscription(sub_for({}, {}));
  b.create_entity(weather());
  auto r1 = b.dispatch_pending();
  EXPECT_EQ(r1.retried, 1u);
  auto r2 = b.dispatch_pending();
  EXPECT_EQ(r2.delivered, 1u);
  EXPECT_TRUE(b.dead_letters().empty());
  EXPECT_EQ(sender->bodies.size(), 2u);
}

TEST(Broker, DeadLetterAfterMaxAttempts) {
  Broker b(quick(3), fixed_clock(), std::make_shared<FailingSender>());
  b.create_subscription(sub_for({}, {}));
  b.create_entity(weather());
  DeliveryReport total;
  for (int i = 0; i < 5; ++i) {
    const auto r = b.dispatch_pending();
    total.attempted += r.attempted;
    total.dead_lettered += r.dead_lettered;
  }
  EXPECT_EQ(total.attempted, 3u);
  EXPECT_EQ(total.dead_lettered, 1u);
  ASSERT_EQ(b.dead_letters().size(), 1u);
  EXPECT_EQ(b.dead_letters()[0].attempt, 3);
  EXPECT_EQ(b.pending_count(), 0u);
}

TEST(Broker, DispatcherDrainsWithBackoff) {
  auto sender = std::make_shared<ScriptedSender>(std::deque<bool>{false, false});
  Broker b(quick(5), fixed_clock(), sender);
  b.create_subscription(sub_for({}, {}));
  b.start_dispatcher();
  b.create_entity(weather());
  ASSERT_TRUE(b.wait_idle(std::chrono::seconds(5)));
  b.stop_dispatcher();
  EXPECT_EQ(sender->bodies.size(), 3u);
  EXPECT_TRUE(b.dead_letters().empty());
}

TEST(Broker, QueryByTypeAndPredicate) {
  Broker b(quick(), fixed_clock(), std::make_shared<ScriptedSender>());
  for (int i = 0; i < 10; ++i) {
    Entity e(EntityId("urn:WeatherObserved:" + std::to_string(i)), "WeatherObserved");
    e.set(Attribute::property("temperature", i));
    b.create_entity(e);
  }
  b.create_entity(Entity(EntityId("urn:Other:1"), "Other"));
  EntityQuery q;
  q.type = "WeatherObserved";
  EXPECT_EQ(b.query_entities(q).size(), 10u);
  q.predicate = parse_predicate("temperature>6");
  EXPECT_EQ(b.query_entities(q).size(), 3u);
  q.limit = 2;
  EXPECT_EQ(b.query_entities(q).size(), 2u);
}

TEST(Broker, TemplateValidationOnWrite) {
  auto config = quick();
  config.templates = &entity::TemplateRegistry::builtin();
  Broker b(config, fixed_clock(), std::make_shared<ScriptedSender>());
  Entity bad(EntityId("urn:WeatherObserved:Bad"), "WeatherObserved");
  bad.set(Attribute::property("temperature", "warm"));
  EXPECT_THROW(b.create_entity(bad), Error);
  EXPECT_NO_THROW(b.create_entity(weather()));
}

TEST(Broker, SnapshotRoundTrip) {
  const auto dir = lodbridge::testing::temp_dir("broker-snapshot");
  const auto path = (dir / "snapshot.json").string();
  Broker a(quick(), fixed_clock(), std::make_shared<ScriptedSender>());
  a.create_entity(weather());
  a.create_subscription(sub_for({"WeatherObserved"}, {"temperature"}));
  a.save_snapshot(path);

  Broker b(quick(), fixed_clock(), std::make_shared<ScriptedSender>());
  b.load_snapshot(path);
  EXPECT_EQ(b.get_entity(EntityId("urn:WeatherObserved:Santander")), weather());
  ASSERT_EQ(b.subscriptions().size(), 1u);
  EXPECT_EQ(b.subscriptions()[0].watched_attributes, std::vector<std::string>{"temperature"});
}

TEST(BrokerHttp, EndToEndThroughServerAndClient) {
  // Notification sink.
  http::Server sink;
  std::mutex mu;
  std::vector<Json> received;
  sink.routes().Post("/notify", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(mu);
    received.push_back(parse_json(req.body));
    res.status = 200;
  });
  sink.start();

  Broker b(quick(), fixed_clock(), std::make_shared<HttpNotificationSender>());
  b.start_dispatcher();
  BrokerServer server(b, &entity::TemplateRegistry::builtin());
  server.start();
  HttpBrokerClient client(server.base_url());

  client.subscribe(sub_for({"WeatherObserved"}, {"temperature"}, sink.base_url() + "/notify"));
  EXPECT_TRUE(client.upsert(weather()));
  EXPECT_FALSE(client.upsert(weather(15.1)));
  const auto got = client.get(EntityId("urn:WeatherObserved:Santander"));
  ASSERT_TRUE(got);
  EXPECT_EQ(got->find("temperature")->value, 15.1);
  EXPECT_FALSE(client.get(EntityId("urn:WeatherObserved:Nowhere")));

  ASSERT_TRUE(b.wait_idle(std::chrono::seconds(5)));
  {
    std::lock_guard lock(mu);
    ASSERT_EQ(received.size(), 2u);
    EXPECT_EQ(received[1].at("data").at(0).at("temperature").at("value"), 15.1);
  }

  const auto base = server.base_url() + "/ngsi-ld/v1/entities";
  EXPECT_EQ(http::post(base, R"({"id": "not-a-urn", "type": "X"})").status, 400);
  EXPECT_EQ(http::post(base, "{ nope").status, 400);
  EXPECT_EQ(http::post(base, dump_compact(entity::to_key_values(weather()))).status, 409);
  EXPECT_EQ(http::get(base + "/urn%3AX%3Amissing").status, 404);
  EXPECT_EQ(http::patch(base + "/urn%3AWeatherObserved%3ASantander/attrs", R"({"type": "Other"})").status, 400);
  const auto kv = http::get(base + "/urn%3AWeatherObserved%3ASantander?options=keyValues");
  EXPECT_EQ(parse_json(kv.body).at("temperature"), 15.1);
  EXPECT_EQ(http::del(base + "/urn%3AWeatherObserved%3ASantander").status, 204);
  EXPECT_EQ(http::get(base + "/urn%3AWeatherObserved%3ASantander").status, 404);

  server.stop();
  b.stop_dispatcher();
  sink.stop();
}
