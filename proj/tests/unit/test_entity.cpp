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

#include <random>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/entity/entity.hpp"
#include "lodbridge/entity/representation.hpp"
#include "lodbridge/entity/templates.hpp"

using namespace lodbridge;
using namespace lodbridge::entity;

namespace {

Json listing() { return read_json_file(std::string(LODBRIDGE_FIXTURES_DIR) + "/entities/weather-observed.json"); }

const DataModelTemplate& weather_template() { return *TemplateRegistry::builtin().find("WeatherObserved"); }

}  // namespace

TEST(EntityId, RequiresUrnPrefix) {
  EXPECT_NO_THROW(EntityId("urn:WeatherObserved:Santander"));
  EXPECT_THROW(EntityId("WeatherObserved:Santander"), Error);
  EXPECT_THROW(EntityId("urn:"), Error);
  EXPECT_THROW(EntityId(""), Error);
}

TEST(Attribute, RelationshipRules) {
  auto rel = Attribute::relationship("refRoadSegment", EntityId("urn:RoadSegment:1"));
  EXPECT_NO_THROW(rel.check());
  rel.unit_code = "MTR";
  EXPECT_THROW(rel.check(), Error);
  auto bad = Attribute::relationship("refRoadSegment", EntityId("urn:RoadSegment:1"));
  bad.value = "not-a-urn";
  EXPECT_THROW(bad.check(), Error);
}

TEST(Entity, AttributeNamesStayUnique) {
  Entity e(EntityId("urn:X:1"), "X");
  e.set(Attribute::property("a", 1));
  e.set(Attribute::property("a", 2));
  ASSERT_EQ(e.attributes().size(), 1u);
  EXPECT_EQ(e.find("a")->value, 2);
  EXPECT_TRUE(e.erase("a"));
  EXPECT_FALSE(e.erase("a"));
}

TEST(KeyValues, ListingGivesFourAttributes) {
  const auto e = from_key_values(listing(), &weather_template());
  EXPECT_EQ(e.id().str(), "urn:WeatherObserved:Santander");
  EXPECT_EQ(e.type(), "WeatherObserved");
  ASSERT_EQ(e.attributes().size(), 4u);
  EXPECT_EQ(e.attributes()[0].name, "address");
  EXPECT_EQ(e.find("temperature")->unit_code, "CEL");
  EXPECT_EQ(e.context(), std::vector<std::string>{"https://smartdatamdels.org/context.jsonld"});
}

TEST(KeyValues, ProjectionReproducesListingFieldForField) {
  const auto e = from_key_values(listing(), &weather_template());
  EXPECT_EQ(dump_compact(to_key_values(e)), dump_compact(listing()));
}

TEST(KeyValues, IdAndTypeOnlyGetsDefaultContext) {
  const auto e = from_key_values(parse_json(R"({"id": "urn:X:1", "type": "X"})"));
  EXPECT_TRUE(e.attributes().empty());
  EXPECT_EQ(e.context(), std::vector<std::string>{std::string(kDefaultContext)});
  const auto doc = to_key_values(e);
  EXPECT_EQ(doc.size(), 3u);
  EXPECT_TRUE(doc.contains("@context"));
}

TEST(KeyValues, RoundTripDropsOnlyUnitCodeAndObservedAt) {
  auto e = from_key_values(listing(), &weather_template());
  auto with_extras = e;
  auto t = *with_extras.find("temperature");
  t.observed_at = parse_timestamp("2021-11-10T15:00:00Z");
  with_extras.set(t);
  EXPECT_EQ(from_key_values(to_key_values(with_extras), &weather_template()), e);
}

TEST(Normalized, RoundTripKeepsEverything) {
  auto e = from_key_values(listing(), &weather_template());
  auto t = *e.find("temperature");
  t.observed_at = parse_timestamp("2021-11-10T15:00:00Z");
  e.set(t);
  e.set(Attribute::geo_property("location", parse_json(R"({"type":"Point","coordinates":[-3.8,43.46]})")));
  const auto doc = to_normalized(e);
  EXPECT_EQ(doc.at("temperature").at("type"), "Property");
  EXPECT_EQ(doc.at("temperature").at("unitCode"), "CEL");
  EXPECT_EQ(doc.at("location").at("type"), "GeoProperty");
  EXPECT_EQ(from_normalized(doc), e);
  EXPECT_EQ(from_document(doc), e);
}

TEST(Normalized, ProjectionEqualsKeyValues) {
  const auto e = from_key_values(listing(), &weather_template());
  EXPECT_EQ(canonical_dump(to_key_values(from_normalized(to_normalized(e)))), canonical_dump(to_key_values(e)));
}

TEST(Validate, ListingHasNoFindings) {
  const auto e = from_key_values(listing(), &weather_template());
  EXPECT_TRUE(validate_entity(e, weather_template()).ok());
}

TEST(Validate, OneFindingPerMissingRequiredAttribute) {
  auto e = from_key_values(listing(), &weather_template());
  std::size_t required = 0;
  for (const auto& s : weather_template().attributes) {
    if (s.required) {
      e.erase(s.name);
      ++required;
    }
  }
  const auto report = validate_entity(e, weather_template());
  ASSERT_EQ(report.findings.size(), required);
  for (const auto& f : report.findings) EXPECT_EQ(f.violation, Violation::missing);
}

TEST(Validate, StringTemperatureIsAShapeFinding) {
  auto doc = listing();
  doc["temperature"] = "14.6";
  const auto e = from_key_values(doc, &weather_template());
  const auto report = validate_entity(e, weather_template());
  ASSERT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(report.findings[0].attribute, "temperature");
  EXPECT_EQ(report.findings[0].violation, Violation::wrong_shape);
}

TEST(Validate, ShapeFindingsMatchADirectSchemaWalk) {
  std::mt19937 rng(3);
  const std::vector<Json> values = {Json(1), Json(2.5), Json("s"), Json(true), Json::object(), Json::array()};
  for (int n = 0; n < 200; ++n) {
    Entity e(EntityId("urn:WeatherObserved:" + std::to_string(n)), "WeatherObserved");
    std::size_t expected = 0;
    for (const auto& schema : weather_template().attributes) {
      if (schema.kind != AttributeKind::property) continue;
      if (std::bernoulli_distribution(0.3)(rng)) {
        if (schema.required) ++expected;
        continue;
      }
      const auto& v = values[std::uniform_int_distribution<std::size_t>(0, values.size() - 1)(rng)];
      bool fits = false;
      switch (schema.shape) {
        case ValueShape::number: fits = v.is_number(); break;
        case ValueShape::string: fits = v.is_string(); break;
        case ValueShape::boolean: fits = v.is_boolean(); break;
        case ValueShape::object: fits = v.is_object(); break;
        default: break;
      }
      if (!fits) ++expected;
      e.set(Attribute::property(schema.name, v));
    }
    EXPECT_EQ(validate_entity(e, weather_template()).findings.size(), expected) << n;
  }
}

TEST(Validate, WrongTemplateTypeThrows) {
  const auto e = from_key_values(listing());
  EXPECT_THROW(validate_entity(e, *TemplateRegistry::builtin().find("TrafficFlowObserved")), Error);
}

TEST(Templates, RejectDuplicatesAndNoRequired) {
  DataModelTemplate t{"X", {{"a", AttributeKind::property, ValueShape::number, true, {}},
                            {"a", AttributeKind::property, ValueShape::number, false, {}}}};
  EXPECT_THROW(t.check(), Error);
  DataModelTemplate none{"Y", {{"a", AttributeKind::property, ValueShape::number, false, {}}}};
  EXPECT_THROW(none.check(), Error);
}

TEST(Merge, UpdatesOneAttributeAndKeepsTheRest) {
  const auto e = from_key_values(listing(), &weather_template());
  const auto merged = merge_update(e, {Attribute::property("temperature", 15.1)});
  EXPECT_EQ(merged.find("temperature")->value, 15.1);
  EXPECT_EQ(merged.find("precipitation")->value, 0);
  EXPECT_EQ(merge_update(e, {}), e);
  auto fresh = e;
  fresh.set(Attribute::property("temperature", 15.1));
  EXPECT_EQ(merged, fresh);
}

TEST(Merge, ReservedNamesAreImmutable) {
  const auto e = from_key_values(listing());
  try {
    merge_update(e, {Attribute::property("id", "urn:Other:1")});
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), Errc::immutable_field);
  }
  EXPECT_THROW(fragment_from_document(parse_json(R"({"type": "Other"})"), &e), Error);
  EXPECT_NO_THROW(fragment_from_document(parse_json(R"({"type": "WeatherObserved", "temperature": 1})"), &e));
}

TEST(Merge, ChangedAttributesIgnoresEqualValues) {
  const auto e = from_key_values(listing(), &weather_template());
  const auto same = *e.find("temperature");
  EXPECT_TRUE(changed_attributes(e, {same}).empty());
  EXPECT_EQ(changed_attributes(e, {Attribute::property("temperature", 15.1), Attribute::property("new", 1)}),
            (std::vector<std::string>{"temperature", "new"}));
}
