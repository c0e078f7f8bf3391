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

#include <fstream>
#include <random>
#include <sstream>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/historian/historian.hpp"
#include "lodbridge/historian/server.hpp"
#include "oracles.hpp"

using namespace lodbridge;
using namespace lodbridge::historian;

namespace {

const std::string kFixtures = LODBRIDGE_FIXTURES_DIR;

std::shared_ptr<ManualClock> fixed_clock() {
  return std::make_shared<ManualClock>(parse_timestamp("2021-11-10T15:00:05Z"));
}

Json listing_notification(const std::string& notified_at = "2021-11-10T15:00:00.00Z") {
  return Json{{"subscriptionId", "urn:Subscription:1"},
              {"notifiedAt", notified_at},
              {"data", Json::array({read_json_file(kFixtures + "/entities/weather-observed.json")})}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Historian, ListingNotificationGivesFourRecords) {
  Historian h(lodbridge::testing::temp_dir("hist-four"), fixed_clock());
  const auto appended = h.on_notification(listing_notification());
  ASSERT_EQ(appended.size(), 4u);
  std::vector<std::string> names;
  for (const auto& r : appended) {
    names.push_back(r.attr_name);
    EXPECT_EQ(r.entity_id, "urn:WeatherObserved:Santander");
    EXPECT_EQ(format_utc(r.observed_at), "2021-11-10T15:00:00.00Z");
    EXPECT_EQ(format_utc(r.received_at), "2021-11-10T15:00:05.00Z");
  }
  EXPECT_EQ(names, (std::vector<std::string>{"address", "dateObserved", "precipitation", "temperature"}));
  EXPECT_EQ(appended[0].seq, 1u);
  EXPECT_EQ(appended[3].seq, 4u);
  EXPECT_EQ(appended[3].value, 14.6);
}

TEST(Historian, RedeliveryIsDeduplicated) {
  Historian h(lodbridge::testing::temp_dir("hist-dedupe"), fixed_clock());
  h.on_notification(listing_notification());
  EXPECT_TRUE(h.on_notification(listing_notification()).empty());
  EXPECT_EQ(h.size(), 4u);
  EXPECT_EQ(h.on_notification(listing_notification("2021-11-10T16:00:00Z")).size(), 4u);
  EXPECT_EQ(h.size(), 8u);
}

TEST(Historian, MalformedBodiesAppendNothing) {
  Historian h(lodbridge::testing::temp_dir("hist-bad"), fixed_clock());
  for (const auto* body : {R"({"notifiedAt": "2021-11-10T15:00:00Z"})", R"({"data": {}})",
                           R"({"data": [], "notifiedAt": "yesterday"})",
                           R"({"data": [{"id": "urn:X:1", "type": "X", "a": 1}, {"id": "bad", "type": "X"}]})"}) {
    try {
      h.on_notification(parse_json(body));
      FAIL() << body;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::malformed) << body;
    }
  }
  EXPECT_EQ(h.size(), 0u);
}

TEST(Historian, CsvExportHasHeaderAndOneLinePerRecord) {
  const auto dir = lodbridge::testing::temp_dir("hist-csv");
  Historian h(dir / "log", fixed_clock());
  h.on_notification(listing_notification());
  const auto path = (dir / "out.csv").string();
  EXPECT_EQ(h.export_to(path, ExportFormat::csv), 4u);
  const auto lines = lines_of(read_text_file(path));
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[0], kCsvHeader);
  const auto address = text::parse_csv_line(lines[1]);
  ASSERT_EQ(address.size(), 7u);
  EXPECT_EQ(address[3], "address");
  EXPECT_EQ(address[4], R"({"addressCountry":"ES","addressLocality":"Santander"})");
  EXPECT_EQ(text::parse_csv_line(lines[2])[4], "2021-11-10T15:00:00.00Z");
  EXPECT_EQ(text::parse_csv_line(lines[4])[4], "14.6");
}

TEST(Historian, JsonlExportReadsBack) {
  const auto dir = lodbridge::testing::temp_dir("hist-jsonl");
  Historian h(dir / "log", fixed_clock());
  h.on_notification(listing_notification());
  h.on_notification(listing_notification("2021-11-10T16:00:00Z"));
  const auto path = (dir / "out.jsonl").string();
  h.export_to(path, ExportFormat::jsonl);
  EXPECT_EQ(read_jsonl(path), h.records());
  // Range-limited export.
  EXPECT_EQ(h.export_to(path, ExportFormat::jsonl, parse_timestamp("2021-11-10T15:30:00Z")), 4u);
}

TEST(Historian, QueryRanges) {
  Historian h(lodbridge::testing::temp_dir("hist-query"), fixed_clock());
  h.on_notification(listing_notification());
  const auto t = parse_timestamp("2021-11-10T15:00:00Z");
  EXPECT_TRUE(h.query("urn:WeatherObserved:Santander", "temperature", t, t).empty());
  EXPECT_EQ(h.query("urn:WeatherObserved:Santander", "temperature", t, t + std::chrono::milliseconds(1)).size(), 1u);
  EXPECT_TRUE(h.query("urn:WeatherObserved:Nowhere", "temperature", Timestamp{}, Timestamp::max()).empty());
  EXPECT_THROW(h.query("urn:WeatherObserved:Santander", "temperature", t, t - std::chrono::seconds(1)), Error);
}

TEST(Historian, QueryMatchesAFilterOracle) {
  Historian h(lodbridge::testing::temp_dir("hist-oracle"), fixed_clock());
  std::mt19937 rng(4);
  const auto base = parse_timestamp("2021-11-01T00:00:00Z");
  for (int n = 0; n < 60; ++n) {
    Json data = Json::array();
    for (int e = 0; e < 3; ++e) {
      if (std::bernoulli_distribution(0.6)(rng)) {
        data.push_back(Json{{"id", "urn:S:" + std::to_string(e)},
                            {"type", "S"},
                            {"v", std::uniform_int_distribution<int>(0, 9)(rng)},
                            {"w", "x"}});
      }
    }
    const auto at = base + std::chrono::minutes(std::uniform_int_distribution<int>(0, 600)(rng));
    h.on_notification(Json{{"notifiedAt", format_utc(at)}, {"data", data}});
  }
  const auto all = h.records();
  for (int q = 0; q < 100; ++q) {
    const std::string id = "urn:S:" + std::to_string(q % 3);
    const auto a = base + std::chrono::minutes(std::uniform_int_distribution<int>(0, 600)(rng));
    const auto b = a + std::chrono::minutes(std::uniform_int_distribution<int>(0, 200)(rng));
    std::vector<HistoryRecord> expected;
    for (const auto& r : all) {
      if (r.entity_id == id && r.attr_name == "v" && r.observed_at >= a && r.observed_at < b) expected.push_back(r);
    }
    std::stable_sort(expected.begin(), expected.end(),
                     [](const auto& x, const auto& y) { return x.observed_at < y.observed_at; });
    EXPECT_EQ(h.query(id, "v", a, b), expected) << q;
  }
}

TEST(Historian, ReopenRestoresRecordsAndCutsTornTail) {
  const auto dir = lodbridge::testing::temp_dir("hist-reopen");
  std::vector<HistoryRecord> before;
  {
    Historian h(dir, fixed_clock(), 512);
    for (int i = 0; i < 10; ++i) {
      h.on_notification(listing_notification(format_utc(parse_timestamp("2021-11-10T15:00:00Z") + std::chrono::hours(i))));
    }
    before = h.records();
  }
  std::size_t segments = 0;
  std::filesystem::path last;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().filename().string().rfind("segment-", 0) == 0) {
      ++segments;
      if (last.empty() || entry.path().filename() > last.filename()) last = entry.path();
    }
  }
  EXPECT_GT(segments, 1u);
  {
    std::ofstream torn(last, std::ios::app | std::ios::binary);
    torn << "0000004f {\"seq\": 99, \"entit";
  }
  Historian again(dir, fixed_clock(), 512);
  EXPECT_EQ(again.records(), before);
  EXPECT_GT(again.discarded_bytes(), 0u);
  // Sequence numbers continue and dedupe state survives.
  EXPECT_TRUE(again.on_notification(listing_notification()).empty());
  const auto more = again.on_notification(listing_notification("2022-01-01T00:00:00Z"));
  ASSERT_EQ(more.size(), 4u);
  EXPECT_EQ(more[0].seq, before.back().seq + 1);
}

TEST(HistorianHttp, NotifyQueryExport) {
  Historian h(lodbridge::testing::temp_dir("hist-http"), fixed_clock());
  HistorianServer server(h);
  server.start();
  const auto ok = http::post(server.notify_url(), dump_compact(listing_notification()));
  ASSERT_EQ(ok.status, 200);
  EXPECT_EQ(parse_json(ok.body).at("appended"), 4);
  EXPECT_EQ(http::post(server.notify_url(), R"({"data": 1})").status, 400);
  EXPECT_EQ(http::post(server.notify_url(), "not json").status, 400);

  const auto rows = http::get(server.base_url() +
                              "/historian/query?entity=urn%3AWeatherObserved%3ASantander&attr=temperature");
  ASSERT_EQ(rows.status, 200);
  EXPECT_EQ(parse_json(rows.body).size(), 1u);
  EXPECT_EQ(http::get(server.base_url() + "/historian/query?entity=x&attr=y&from=2022-01-01T00:00:00Z&to=2021-01-01T00:00:00Z")
                .status,
            400);
  const auto csv = http::get(server.base_url() + "/historian/export?format=csv");
  EXPECT_EQ(lines_of(csv.body).size(), 5u);
  server.stop();
}
