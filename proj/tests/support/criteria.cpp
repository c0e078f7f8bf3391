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

#include "criteria.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/catalog/catalog.hpp"
#include "lodbridge/catalog/client.hpp"
#include "lodbridge/catalog/server.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/dataflow/catalog_publisher.hpp"
#include "lodbridge/dataflow/pipeline.hpp"
#include "lodbridge/dataflow/transform.hpp"
#include "lodbridge/dcat/shapes.hpp"
#include "lodbridge/entity/representation.hpp"
#include "lodbridge/entity/templates.hpp"
#include "lodbridge/harvester/sparql.hpp"
#include "lodbridge/harvester/store.hpp"
#include "lodbridge/historian/historian.hpp"
#include "lodbridge/mqa/mqa.hpp"
#include "lodbridge/scenario/scenario.hpp"
#include "oracles.hpp"

namespace lodbridge::testing {

namespace fs = std::filesystem;
using namespace std::chrono_literals;
using dcat::Term;

namespace {

const fs::path kFixtures = LODBRIDGE_FIXTURES_DIR;

struct Failed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& what) {
  if (!condition) throw Failed(what);
}

CriterionResult guarded(const std::function<std::string()>& body) {
  try {
    return {true, body()};
  } catch (const Failed& f) {
    return {false, f.what()};
  } catch (const std::exception& e) {
    return {false, std::string("unexpected exception: ") + e.what()};
  }
}

Term iri(const std::string& curie) { return Term::iri(dcat::expand(curie)); }

std::shared_ptr<ManualClock> pinned_clock(std::chrono::milliseconds step = 0ms) {
  return std::make_shared<ManualClock>(parse_timestamp("2021-11-10T16:00:00Z"), step);
}

// The consumer query as printed in the source listing.
const char* kListingQuery =
    "PREFIX dcat: <http://www.w3.org/ns/dcat#>\n"
    "PREFIX dct: <http://purl.org/dc/terms/>\n"
    "PREFIX foaf: <http://xmlns.com/foaf/0.1/>\n"
    "SELECT DISTINCT ?dataset  WHERE { ?dataset a dcat:Dataset . \n"
    "  ?dataset dct:publisher ?publisher .\n"
    "  ?publisher foaf:name \"Ayuntamiento de Santander\" .\n"
    "  ?dataset dct:description ?title .FILTER regex(str(?title), \"bicycle\") .\n"
    "} LIMIT 10\n";

}  // namespace

// 1 -------------------------------------------------------------------------

CriterionResult transform_listing() {
  return guarded([] {
    const auto input = read_json_file((kFixtures / "aemet.json").string());
    const auto spec = dataflow::TransformSpec::load((kFixtures / "weather-transform.json").string());
    const auto out = dataflow::apply_transform(input, spec);
    const auto golden = read_json_file((kFixtures / "entities/weather-observed.json").string());
    expect(canonical_dump(out) == canonical_dump(golden),
           "canonical mismatch: got " + canonical_dump(out) + " want " + canonical_dump(golden));
    expect(dump_compact(out) == dump_compact(golden), "field order differs from the listing");
    expect(dump_compact(out.at("precipitation")) == "0", "precipitation is not 0");
    expect(dump_compact(out.at("temperature")) == "14.6", "temperature is not 14.6");
    expect(out.at("dateObserved") == "2021-11-10T15:00:00.00Z", "dateObserved differs");
    expect(out.at("address").at("addressLocality") == "Santander", "addressLocality differs");
    expect(out.at("id") == "urn:WeatherObserved:Santander", "id differs");
    return canonical_dump(out);
  });
}

// 2 -------------------------------------------------------------------------

CriterionResult dcat_ap_listing() {
  return guarded([] {
    auto clock = pinned_clock();
    const auto config = dataflow::PipelineConfig::load(
        kFixtures / "pipelines/publisher.yaml",
        {{"catalogUrl", "http://127.0.0.1:1"}, {"brokerPublicUrl", scenario::kBrokerPublicBase}});
    const auto metadata_params = dataflow::MetadataParams::from_json(config.find("weather-metadata")->params);
    const auto publication_params = dataflow::PublicationParams::from_json(config.find("weather-to-catalog")->params);

    const auto& templates = entity::TemplateRegistry::builtin();
    const auto keyvalues = read_json_file((kFixtures / "entities/weather-observed.json").string());
    const auto weather = entity::from_key_values(keyvalues, templates.find("WeatherObserved"));
    const auto metadata = dataflow::generate_catalog_metadata(weather, metadata_params, *clock);

    catalog::Catalog cat(std::nullopt, clock);
    catalog::LocalCatalogClient client(cat);
    const auto result =
        dataflow::publish_dataset_to_catalog(entity::to_normalized(weather), publication_params, client, metadata);
    expect(result.datasets_created.size() == 1, "expected one dataset created");
    const auto dataset_id = result.datasets_created.front();

    const dcat::PortalIdentity portal{scenario::kCatalogPublicBase, "LOD Bridge Santander", "Santander open data",
                                      "LOD Bridge Santander"};
    const auto rdf = catalog::export_dataset(cat, dataset_id, portal, dcat::Profile::dcat_ap, dcat::Format::rdfxml);
    const auto g = dcat::parse_rdfxml(rdf);

    const auto datasets = g.subjects(iri("rdf:type"), iri("dcat:Dataset"));
    expect(datasets.size() == 1, "export should hold exactly one dcat:Dataset");
    const auto& ds = datasets.front();
    expect(g.contains({ds, iri("dct:title"), Term::literal("Santander AEMET Weather")}),
           "dct:title \"Santander AEMET Weather\" missing");
    expect(g.contains({ds, iri("dct:description"), Term::literal("Santander weather in real time")}),
           "dct:description \"Santander weather in real time\" missing");
    bool distribution_title = false;
    for (const auto& d : g.objects(ds, iri("dcat:distribution"))) {
      distribution_title = distribution_title ||
                           (g.contains({d, iri("rdf:type"), iri("dcat:Distribution")}) &&
                            g.contains({d, iri("dct:title"), Term::literal("Santander WeatherObserved Entity")}));
    }
    expect(distribution_title, "distribution dct:title \"Santander WeatherObserved Entity\" missing");

    const auto reparsed = dcat::parse_rdfxml(dcat::serialize_rdfxml(g));
    expect(brute_isomorphic(g, reparsed), "RDF/XML round trip is not isomorphic");
    const auto report = dcat::validate_shapes(g, dcat::ShapeSet::bundled());
    expect(report.conforms(), "shape violations: " + report.to_json().dump());
    return std::to_string(g.size()) + " triples, " + std::to_string(report.results.size()) +
           " shape checks passed";
  });
}

// 3 -------------------------------------------------------------------------

CriterionResult sparql_listing() {
  return guarded([] {
    const auto query = read_text_file((kFixtures / "bicycle-query.rq").string());
    expect(query == kListingQuery, "query fixture is not the verbatim listing");
    const auto portal = read_text_file((kFixtures / "portal/catalog.ttl").string());

    harvester::NamedGraphStore store(std::nullopt, pinned_clock());
    store.add_source({"santander", "http://datos.santander.example/catalog.ttl", dcat::Format::turtle, {}});
    const auto report = store.harvest("santander", [&](const std::string&) {
      http::Response r;
      r.status = 200;
      r.body = portal;
      return r;
    });
    expect(report.ok, "harvest failed: " + report.error);

    const auto plan = harvester::parse_query(query);
    const auto union_graph = store.union_graph();
    const auto result = harvester::execute_query(plan, union_graph);
    expect(result.rows.size() == 1, "expected 1 row, got " + std::to_string(result.rows.size()));
    expect(result.rows[0][0] == Term::iri(scenario::kBikeDatasetIri), "row is " + result.rows[0][0].to_ntriples());
    const auto oracle = naive_join(plan, union_graph);
    expect(oracle.rows == result.rows, "engine and join oracle disagree");
    return result.rows[0][0].value;
  });
}

// 4 -------------------------------------------------------------------------

CriterionResult mqa_distribution() {
  return guarded([] {
    const std::vector<std::pair<mqa::Rating, std::size_t>> counts = {{mqa::Rating::excellent, 124},
                                                                     {mqa::Rating::good, 233867},
                                                                     {mqa::Rating::sufficient, 677400},
                                                                     {mqa::Rating::bad, 486359}};
    const std::map<mqa::Rating, double> published = {{mqa::Rating::excellent, 0.009},
                                                     {mqa::Rating::good, 16.731},
                                                     {mqa::Rating::sufficient, 48.464},
                                                     {mqa::Rating::bad, 34.796}};
    std::vector<mqa::Rating> ratings;
    ratings.reserve(1397750);
    for (const auto& [r, n] : counts) ratings.insert(ratings.end(), n, r);
    const auto dist = mqa::score_catalog(ratings);
    expect(dist.total == 1397750, "total is " + std::to_string(dist.total));
    std::size_t sum = 0;
    std::ostringstream detail;
    for (const auto& [r, n] : counts) {
      expect(dist.counts.at(r) == n, std::string("count mismatch for ") + std::string(mqa::to_string(r)));
      sum += dist.counts.at(r);
      const double pct = dist.percentages.at(r);
      expect(std::abs(pct - published.at(r)) <= 0.002 + 1e-9,
             std::string(mqa::to_string(r)) + " percentage " + std::to_string(pct));
      detail << mqa::to_string(r) << "=" << pct << " ";
    }
    expect(sum == 1397750, "counts do not sum to the total");
    return detail.str();
  });
}

// 5 -------------------------------------------------------------------------

namespace {

class FlakySender final : public broker::NotificationSender {
 public:
  struct Trace {
    int attempts = 0;
    bool delivered = false;
    std::uint64_t min_seq_seen = UINT64_MAX;
  };

  FlakySender(std::set<std::string> dead, const broker::Broker*& broker) : dead_(std::move(dead)), broker_(broker) {}

  bool deliver(const std::string& endpoint, const std::string& body) override {
    const auto seq = broker_->commit_seq();
    const auto doc = parse_json(body);
    std::lock_guard lock(mu_);
    bool ok = true;
    for (const auto& e : doc.at("data")) {
      const int rev = e.at("rev").at("value").get<int>();
      auto& t = traces_[{endpoint, rev}];
      ++t.attempts;
      t.min_seq_seen = std::min(t.min_seq_seen, seq);
      // Deterministic 30 % failure rate per attempt, always for dead endpoints.
      const auto h = std::hash<std::string>{}(endpoint + "#" + std::to_string(rev) + "#" + std::to_string(t.attempts));
      ok = ok && !dead_.count(endpoint) && h % 10 >= 3;
    }
    for (const auto& e : doc.at("data")) {
      if (ok) traces_[{endpoint, e.at("rev").at("value").get<int>()}].delivered = true;
    }
    return ok;
  }

  std::map<std::pair<std::string, int>, Trace> traces() const {
    std::lock_guard lock(mu_);
    return traces_;
  }

 private:
  std::set<std::string> dead_;
  const broker::Broker*& broker_;
  mutable std::mutex mu_;
  std::map<std::pair<std::string, int>, Trace> traces_;
};

}  // namespace

CriterionResult publish_subscribe_contract(std::size_t operations, unsigned seed) {
  return guarded([&] {
    std::mt19937 rng(seed);
    const std::vector<std::string> types = {"Alpha", "Beta", "Gamma"};
    const std::vector<std::string> attrs = {"a", "b", "c", "d"};

    struct Sub {
      std::string endpoint;
      std::vector<std::string> types;
      std::vector<std::string> watched;
    };
    std::vector<Sub> subs;
    std::set<std::string> dead;
    for (int i = 0; i < 10; ++i) {
      Sub s;
      s.endpoint = "http://subscriber-" + std::to_string(i) + ".test/notify";
      for (const auto& t : types) {
        if (std::bernoulli_distribution(0.4)(rng)) s.types.push_back(t);
      }
      for (const auto& a : attrs) {
        if (std::bernoulli_distribution(0.3)(rng)) s.watched.push_back(a);
      }
      if (i < 2) dead.insert(s.endpoint);
      subs.push_back(s);
    }

    const broker::Broker* broker_ptr = nullptr;
    auto sender = std::make_shared<FlakySender>(dead, broker_ptr);
    broker::BrokerConfig cfg;
    cfg.max_attempts = 4;
    cfg.backoff_base = 1ms;
    cfg.backoff_cap = 4ms;
    broker::Broker broker(cfg, pinned_clock(), sender);
    broker_ptr = &broker;
    for (const auto& s : subs) {
      broker::Subscription sub;
      sub.entity_types = s.types;
      sub.watched_attributes = s.watched;
      sub.endpoint = s.endpoint;
      broker.create_subscription(sub);
    }
    broker.start_dispatcher();

    // Oracle state: current attribute values per live entity.
    struct Live {
      std::string type;
      std::map<std::string, int> values;
    };
    std::map<std::string, Live> live;
    std::set<std::pair<std::string, int>> expected;  // (endpoint, rev)
    std::map<int, std::uint64_t> commit_of;           // rev -> commit seq after the write
    std::size_t creates = 0, updates = 0, deletes = 0;

    auto matching = [&](const std::string& type, const std::vector<std::string>& changed, int rev) {
      for (const auto& s : subs) {
        const bool type_ok = s.types.empty() || std::count(s.types.begin(), s.types.end(), type);
        bool attr_ok = s.watched.empty();
        for (const auto& w : s.watched) attr_ok = attr_ok || std::count(changed.begin(), changed.end(), w);
        if (type_ok && attr_ok) expected.insert({s.endpoint, rev});
      }
    };

    for (int rev = 0; rev < static_cast<int>(operations); ++rev) {
      const auto id = "urn:Thing:e" + std::to_string(std::uniform_int_distribution<int>(0, 29)(rng));
      const auto op = std::uniform_int_distribution<int>(0, 9)(rng);
      auto it = live.find(id);
      if (it == live.end()) {
        Live l;
        l.type = types[std::uniform_int_distribution<std::size_t>(0, types.size() - 1)(rng)];
        entity::Entity e(entity::EntityId(id), l.type);
        std::vector<std::string> changed = {"rev"};
        e.set(entity::Attribute::property("rev", rev));
        for (const auto& a : attrs) {
          if (!std::bernoulli_distribution(0.6)(rng)) continue;
          const int v = std::uniform_int_distribution<int>(0, 2)(rng);
          e.set(entity::Attribute::property(a, v));
          l.values[a] = v;
          changed.push_back(a);
        }
        broker.create_entity(e);
        commit_of[rev] = broker.commit_seq();
        matching(l.type, changed, rev);
        live[id] = l;
        ++creates;
      } else if (op < 2) {
        broker.delete_entity(entity::EntityId(id));
        live.erase(it);
        ++deletes;
      } else {
        entity::Fragment f = {entity::Attribute::property("rev", rev)};
        std::vector<std::string> changed = {"rev"};
        for (const auto& a : attrs) {
          if (!std::bernoulli_distribution(0.5)(rng)) continue;
          const int v = std::uniform_int_distribution<int>(0, 2)(rng);
          f.push_back(entity::Attribute::property(a, v));
          auto cur = it->second.values.find(a);
          if (cur == it->second.values.end() || cur->second != v) changed.push_back(a);
          it->second.values[a] = v;
        }
        broker.update_attrs(entity::EntityId(id), f);
        commit_of[rev] = broker.commit_seq();
        matching(it->second.type, changed, rev);
        ++updates;
      }
    }
    expect(broker.wait_idle(60s), "broker did not drain its queue");
    broker.stop_dispatcher();

    const auto traces = sender->traces();
    std::size_t dead_lettered = 0, delivered = 0;
    for (const auto& key : expected) {
      auto t = traces.find(key);
      expect(t != traces.end(), "no delivery attempt for " + key.first + " rev " + std::to_string(key.second));
      expect(t->second.min_seq_seen >= commit_of.at(key.second),
             "notification for rev " + std::to_string(key.second) + " went out before its write committed");
      if (t->second.delivered) {
        expect(t->second.attempts <= cfg.max_attempts, "delivered after more than maxAttempts");
        ++delivered;
      } else {
        expect(t->second.attempts == cfg.max_attempts,
               "undelivered notification attempted " + std::to_string(t->second.attempts) + " times");
        ++dead_lettered;
      }
    }
    for (const auto& [key, t] : traces) {
      expect(expected.count(key), "unexpected notification to " + key.first + " rev " + std::to_string(key.second));
    }
    const auto letters = broker.dead_letters();
    expect(letters.size() == dead_lettered, "dead-letter count " + std::to_string(letters.size()) + " != " +
                                                std::to_string(dead_lettered));
    for (const auto& n : letters) expect(n.attempt == cfg.max_attempts, "dead letter before maxAttempts");
    std::ostringstream out;
    out << creates << " creates, " << updates << " updates, " << deletes << " deletes; " << expected.size()
        << " matched changes, " << delivered << " delivered, " << dead_lettered << " dead-lettered";
    return out.str();
  });
}

// 6 -------------------------------------------------------------------------

CriterionResult query_oracle_equivalence(std::size_t graphs, unsigned seed) {
  return guarded([&] {
    std::mt19937 rng(seed);
    std::size_t queries = 0, rows = 0;
    for (std::size_t i = 0; i < graphs; ++i) {
      const auto g = random_graph(rng, 50);
      for (int k = 0; k < 3; ++k) {
        const auto text = random_query(rng, g);
        const auto plan = harvester::parse_query(text);
        const auto got = harvester::execute_query(plan, g);
        const auto want = naive_join(plan, g);
        expect(got.variables == want.variables, "projection differs for:\n" + text);
        expect(got.rows == want.rows, "rows differ (" + std::to_string(got.rows.size()) + " vs " +
                                          std::to_string(want.rows.size()) + ") for:\n" + text);
        ++queries;
        rows += got.rows.size();
      }
    }
    return std::to_string(graphs) + " graphs, " + std::to_string(queries) + " queries, " + std::to_string(rows) +
           " rows compared";
  });
}

// 7 -------------------------------------------------------------------------

namespace {

entity::Entity random_entity(std::mt19937& rng, int n) {
  entity::Entity e(entity::EntityId("urn:Sample:" + std::to_string(n)), n % 2 ? "Sample" : "OtherSample",
                   n % 3 ? std::vector<std::string>{} : std::vector<std::string>{"https://example.org/ctx.jsonld"});
  const int attrs = std::uniform_int_distribution<int>(1, 6)(rng);
  for (int i = 0; i < attrs; ++i) {
    Json value;
    switch (std::uniform_int_distribution<int>(0, 5)(rng)) {
      case 0: value = std::uniform_int_distribution<int>(-1000, 1000)(rng); break;
      case 1: value = std::uniform_int_distribution<int>(-1000, 1000)(rng) / 8.0 + 0.125; break;
      case 2: value = "text " + std::to_string(i); break;
      case 3: value = std::bernoulli_distribution(0.5)(rng); break;
      case 4: value = Json{{"nested", {{"x", i}}}, {"list", {1, "two", 3.5}}}; break;
      default: value = Json::array({i, i + 1}); break;
    }
    e.set(entity::Attribute::property("attr" + std::to_string(i), value));
  }
  return e;
}

}  // namespace

CriterionResult round_trips(std::size_t graphs, unsigned seed) {
  return guarded([&] {
    std::mt19937 rng(seed);
    // (a) keyValues
    for (int n = 0; n < 200; ++n) {
      const auto e = random_entity(rng, n);
      const auto text = to_key_values(e).dump();
      const auto back = entity::from_key_values(parse_json(text));
      expect(back == e, "keyValues round trip changed entity " + e.id().str() + ": " + text);
    }
    // (b) Turtle and RDF/XML
    for (std::size_t i = 0; i < graphs; ++i) {
      const auto g = random_graph(rng, 50);
      for (const auto fmt : {dcat::Format::turtle, dcat::Format::rdfxml}) {
        const auto text = dcat::serialize(g, fmt);
        const auto back = dcat::parse(text, fmt);
        expect(brute_isomorphic(g, back), std::string(fmt == dcat::Format::turtle ? "Turtle" : "RDF/XML") +
                                               " round trip not isomorphic for:\n" + text);
      }
    }
    // (c) historian jsonl
    const auto dir = temp_dir("roundtrip-hist");
    historian::Historian hist(dir / "history", pinned_clock(1s));
    for (int n = 0; n < 50; ++n) {
      const auto e = random_entity(rng, n % 7);
      hist.on_notification(Json{{"subscriptionId", "urn:ngsi-ld:Subscription:1"},
                                {"notifiedAt", format_utc(from_unix_millis(1636556400000LL + n * 60000LL))},
                                {"data", Json::array({entity::to_normalized(e)})}});
    }
    const auto path = (dir / "export.jsonl").string();
    const auto written = hist.export_to(path, historian::ExportFormat::jsonl);
    const auto back = historian::read_jsonl(path);
    expect(written == hist.size() && back == hist.records(), "historian jsonl re-parse differs");
    std::istringstream lines(read_text_file(path));
    std::size_t i = 0;
    for (std::string line; std::getline(lines, line); ++i) {
      expect(historian::HistoryRecord::from_json(parse_json(line)) == back.at(i), "jsonl line " + std::to_string(i));
    }
    fs::remove_all(dir);
    return "200 entities, " + std::to_string(graphs) + " graphs x 2 syntaxes, " + std::to_string(written) +
           " history records";
  });
}

// 8 -------------------------------------------------------------------------

namespace {

std::string catalog_state(const catalog::Catalog& cat) {
  Json out = Json::object();
  for (const auto& o : cat.organizations()) out["organizations"].push_back(catalog::to_json(o));
  for (const auto& d : cat.datasets()) out["datasets"].push_back(catalog::to_json(d));
  return canonical_dump(out);
}

std::string publication_idempotence(std::mt19937& rng) {
  auto clock = pinned_clock(1s);
  catalog::Catalog cat(std::nullopt, clock);
  catalog::LocalCatalogClient client(cat);
  const auto config = dataflow::PipelineConfig::load(
      kFixtures / "pipelines/publisher.yaml",
      {{"catalogUrl", "http://127.0.0.1:1"}, {"brokerPublicUrl", scenario::kBrokerPublicBase}});
  const auto metadata_params = dataflow::MetadataParams::from_json(config.find("traffic-metadata")->params);
  const auto publication = dataflow::PublicationParams::from_json(config.find("traffic-to-catalog")->params);

  std::size_t repeats_total = 0;
  for (int sensor = 1; sensor <= 3; ++sensor) {
    const auto doc = Json{{"id", "urn:TrafficFlowObserved:tfo-00" + std::to_string(sensor)},
                          {"type", "TrafficFlowObserved"},
                          {"intensity", 100 + sensor},
                          {"occupancy", 0.25 * sensor}};
    const auto e = entity::from_key_values(doc);
    const auto metadata = dataflow::generate_catalog_metadata(e, metadata_params, *clock);
    const Json notification{{"subscriptionId", "urn:ngsi-ld:Subscription:1"},
                            {"notifiedAt", "2021-11-10T16:00:00.00Z"},
                            {"data", Json::array({entity::to_normalized(e)})}};
    dataflow::publish_dataset_to_catalog(notification, publication, client, metadata);
    const auto once = catalog_state(cat);
    const int repeats = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int r = 0; r < repeats; ++r) {
      const auto again = dataflow::publish_dataset_to_catalog(notification, publication, client, metadata);
      expect(!again.organization_created && again.datasets_created.empty() && again.datasets_updated.empty(),
             "repeat publication reported changes: " + again.to_json().dump());
    }
    repeats_total += repeats;
    expect(catalog_state(cat) == once, "catalog state changed after repeating a publication");
  }
  expect(cat.datasets().size() == 1 && cat.datasets().front().resources.size() == 3,
         "expected one traffic dataset with three resources");
  return std::to_string(repeats_total) + " repeated publications left the catalog unchanged";
}

struct Simulated {
  std::uint64_t completed = 0, dead = 0, forked = 0;
};

// Random DAG of transform/route nodes fed by one or two listeners; the
// expected counts come from walking each record through the graph here.
std::string pipeline_conservation(std::mt19937& rng, std::size_t pipelines) {
  std::uint64_t total_records = 0;
  for (std::size_t n = 0; n < pipelines; ++n) {
    const auto dir = temp_dir("conservation");
    dataflow::PipelineConfig config;
    config.name = "random-" + std::to_string(n);
    config.dead_letter_dir = dir / "dlq";
    const int sources = std::uniform_int_distribution<int>(1, 2)(rng);
    const int nodes = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<bool> is_transform(nodes);
    for (int s = 0; s < sources; ++s) {
      config.processors.push_back({"src" + std::to_string(s), "http-listen", Json{{"sourceId", "s"}}});
    }
    for (int i = 0; i < nodes; ++i) {
      is_transform[i] = std::bernoulli_distribution(0.5)(rng);
      if (is_transform[i]) {
        config.processors.push_back(
            {"n" + std::to_string(i), "transform",
             Json{{"rules", {{{"targetPath", "v"}, {"sourcePath", "v"}}, {{"targetPath", "k"}, {"sourcePath", "k"}}}},
                  {"onMissing", "fail"}}});
      } else {
        config.processors.push_back(
            {"n" + std::to_string(i), "route", Json{{"routes", {{{"name", "a"}, {"path", "k"}, {"equals", "a"}}}}}});
      }
    }
    // edges[from][rel] -> target node indexes
    std::map<std::string, std::map<std::string, std::vector<int>>> edges;
    auto connect = [&](const std::string& from, const std::string& rel, int min_target) {
      if (min_target >= nodes) return;
      const int fan = std::uniform_int_distribution<int>(0, 2)(rng);
      std::set<int> targets;
      for (int f = 0; f < fan; ++f) targets.insert(std::uniform_int_distribution<int>(min_target, nodes - 1)(rng));
      for (int t : targets) {
        config.connections.push_back({from, rel, "n" + std::to_string(t)});
        edges[from][rel].push_back(t);
      }
    };
    for (int s = 0; s < sources; ++s) connect("src" + std::to_string(s), "success", 0);
    for (int i = 0; i < nodes; ++i) {
      const auto name = "n" + std::to_string(i);
      if (is_transform[i]) connect(name, "success", i + 1);
      else {
        connect(name, "a", i + 1);
        connect(name, "unmatched", i + 1);
      }
      if (std::bernoulli_distribution(0.3)(rng)) connect(name, "failure", i + 1);
    }

    Simulated sim;
    std::function<void(int, const Json&)> visit;
    auto forward = [&](const std::string& from, const std::string& rel, const Json& doc, bool failure) {
      auto it = edges.find(from);
      const std::vector<int> none;
      const auto& targets = it != edges.end() && it->second.count(rel) ? it->second.at(rel) : none;
      if (targets.empty()) {
        (failure ? sim.dead : sim.completed) += 1;
        return;
      }
      sim.forked += targets.size() - 1;
      for (int t : targets) visit(t, doc);
    };
    visit = [&](int node, const Json& doc) {
      const auto name = "n" + std::to_string(node);
      if (is_transform[node]) {
        if (!doc.contains("v") || !doc.contains("k")) return forward(name, "failure", doc, true);
        return forward(name, "success", Json{{"v", doc["v"]}, {"k", doc["k"]}}, false);
      }
      const bool a = doc.contains("k") && doc["k"] == "a";
      forward(name, a ? "a" : "unmatched", doc, false);
    };

    dataflow::Services services;
    services.clock = pinned_clock();
    dataflow::PipelineRunner runner(config, services);
    runner.start();
    std::uint64_t posted = 0;
    for (int s = 0; s < sources; ++s) {
      const auto src = "src" + std::to_string(s);
      const int records = std::uniform_int_distribution<int>(5, 30)(rng);
      for (int r = 0; r < records; ++r) {
        Json doc = Json::object();
        if (std::bernoulli_distribution(0.8)(rng)) doc["v"] = r;
        if (std::bernoulli_distribution(0.8)(rng)) doc["k"] = std::bernoulli_distribution(0.5)(rng) ? "a" : "b";
        const auto res = http::post(runner.endpoint(src) + "/ingest/s", doc.dump());
        expect(res.status == 202, "listener refused a record: " + std::to_string(res.status));
        ++posted;
        forward(src, "success", doc, false);
      }
    }
    expect(runner.wait_idle(100ms, 30s), config.name + " did not go idle");
    const auto report = runner.stop();
    std::size_t letters = 0;
    if (fs::exists(dir / "dlq")) {
      for (const auto& f : fs::recursive_directory_iterator(dir / "dlq")) letters += f.is_regular_file();
    }
    const auto tag = config.name + " (" + report.to_json().dump() + ")";
    expect(report.sourced == posted, tag + ": sourced " + std::to_string(report.sourced));
    expect(report.completed == sim.completed, tag + ": completed, expected " + std::to_string(sim.completed));
    expect(report.dead_lettered == sim.dead, tag + ": dead-lettered, expected " + std::to_string(sim.dead));
    expect(report.forked == sim.forked, tag + ": forked, expected " + std::to_string(sim.forked));
    expect(letters == sim.dead, tag + ": dead-letter files " + std::to_string(letters));
    expect(report.conserved(), tag + ": not conserved");
    total_records += posted;
    fs::remove_all(dir);
  }
  return std::to_string(pipelines) + " pipelines, " + std::to_string(total_records) + " records conserved";
}

std::string historian_replay(std::mt19937& rng) {
  const auto dir = temp_dir("replay");
  std::vector<Json> stream;
  std::set<std::tuple<std::string, std::string, std::string>> keys;
  for (int n = 0; n < 120; ++n) {
    const auto id = "urn:BikeHireDockingStation:s" + std::to_string(n % 4);
    const auto observed = format_utc(from_unix_millis(1635724800000LL + (n / 4) * 3600000LL));
    Json doc{{"id", id}, {"type", "BikeHireDockingStation"}};
    for (const auto* attr : {"availableBikeNumber", "freeSlotNumber"}) {
      if (!std::bernoulli_distribution(0.7)(rng)) continue;
      doc[attr] = {{"type", "Property"},
                   {"value", std::uniform_int_distribution<int>(0, 20)(rng)},
                   {"observedAt", observed}};
      keys.insert({id, attr, observed});
    }
    if (doc.size() == 2) continue;
    stream.push_back(Json{{"subscriptionId", "urn:ngsi-ld:Subscription:2"},
                          {"notifiedAt", observed},
                          {"data", Json::array({doc})}});
  }
  historian::Historian hist(dir / "history", pinned_clock(1s));
  for (const auto& body : stream) hist.on_notification(body);
  const auto first = hist.records();
  expect(first.size() == keys.size(), "first pass stored " + std::to_string(first.size()) + " of " +
                                          std::to_string(keys.size()) + " distinct records");
  auto replay = stream;
  for (int i = 0; i < 60; ++i) replay.push_back(stream[std::uniform_int_distribution<std::size_t>(0, stream.size() - 1)(rng)]);
  std::shuffle(replay.begin(), replay.end(), rng);
  for (const auto& body : replay) {
    expect(hist.on_notification(body).empty(), "a duplicated notification appended records");
  }
  expect(hist.records() == first, "replay changed the stored history");
  historian::Historian reopened(dir / "history", pinned_clock());
  expect(reopened.records() == first, "history differs after reopening");
  fs::remove_all(dir);
  return std::to_string(replay.size()) + " replayed notifications added nothing to " + std::to_string(first.size()) +
         " records";
}

}  // namespace

CriterionResult idempotence_and_conservation(std::size_t pipelines, unsigned seed) {
  return guarded([&] {
    std::mt19937 rng(seed);
    const auto a = publication_idempotence(rng);
    const auto b = pipeline_conservation(rng, pipelines);
    const auto c = historian_replay(rng);
    return a + "; " + b + "; " + c;
  });
}

// 9 -------------------------------------------------------------------------

CriterionResult mqa_differential() {
  return guarded([] {
    // The default indicator table, restated here as the reference.
    const std::map<std::string, int> weights = {
        {"keywords", 30},          {"themes", 30},          {"spatial", 20},
        {"temporal", 20},          {"access-url-status", 50}, {"download-url", 20},
        {"download-url-status", 30}, {"format", 20},         {"media-type", 10},
        {"format-vocabulary", 10}, {"format-non-proprietary", 20}, {"format-machine-readable", 20},
        {"dcat-ap-conformance", 30}, {"license", 20},        {"license-vocabulary", 10},
        {"access-rights", 10},     {"access-rights-vocabulary", 5}, {"contact-point", 20},
        {"publisher", 10},         {"rights", 5},           {"byte-size", 5},
        {"issued", 5},             {"modified", 5}};
    const auto& config = mqa::MqaConfig::defaults();
    expect(config.indicators.size() == weights.size(), "default table has " +
                                                           std::to_string(config.indicators.size()) + " indicators");
    int sum = 0;
    for (const auto& [id, w] : weights) sum += w;
    expect(sum == 405 && config.max_possible() == 405, "maximum is not 405");

    const auto full = dcat::parse_turtle(read_text_file((kFixtures / "mqa/full.ttl").string()));
    const auto urls = mqa::StatusMapUrlChecker::load((kFixtures / "mqa/url-status.json").string());
    const auto supporting = read_json_file((kFixtures / "mqa/supporting.json").string());
    const std::string dataset = "http://mqa.example/dataset/full";
    const auto base = mqa::score_dataset(full, dataset, config, urls);
    expect(base.total == 405, "full fixture scores " + std::to_string(base.total));

    for (const auto& ind : config.indicators) {
      expect(weights.count(ind.id) && weights.at(ind.id) == ind.weight, "weight of " + ind.id + " differs");
      expect(supporting.contains(ind.id), "no supporting triples listed for " + ind.id);
      auto g = full;
      for (const auto& line : supporting.at(ind.id)) {
        const auto t = parse_ntriple(line.get<std::string>());
        expect(g.remove(t), ind.id + ": supporting triple not in fixture: " + line.get<std::string>());
      }
      const auto r = mqa::score_dataset(g, dataset, config, urls);
      expect(base.total - r.total == weights.at(ind.id),
             ind.id + ": total dropped by " + std::to_string(base.total - r.total) + ", weight " +
                 std::to_string(weights.at(ind.id)));
    }
    return "23 indicators, each deletion dropped exactly its weight from 405";
  });
}

// 10 ------------------------------------------------------------------------

CriterionResult end_to_end_scenario() {
  return guarded([] {
    const auto root = temp_dir("scenario");
    std::vector<std::string> reports;
    scenario::ScenarioReport last;
    for (const auto* run : {"run-1", "run-2"}) {
      auto options = scenario::ScenarioOptions::defaults(root / run);
      last = scenario::run_scenario(options);
      std::string failure;
      for (const auto& s : last.steps) {
        if (!s.passed) failure = s.name + ": " + s.error;
      }
      expect(last.passed, std::string(run) + " failed at " + failure);
      reports.push_back(read_text_file((root / run / "scenario-report.json").string()));
    }
    expect(reports[0] == reports[1], "scenario reports differ between runs");

    for (const auto* phase : {scenario::kCreation, scenario::kHarmonization, scenario::kPublication,
                              scenario::kCuration, scenario::kDiscovery, scenario::kExploitation}) {
      bool covered = false;
      for (const auto& s : last.steps) covered = covered || s.phase == phase;
      expect(covered, std::string("no step for phase ") + phase);
    }
    for (const auto* artifact : {"broker-snapshot.json", "catalog-data", "exports/catalog.rdf", "mqa-report.json",
                                 "harvest-store", "query-result.json", "history", "scenario-report.json"}) {
      expect(fs::exists(root / "run-2" / artifact), std::string("missing artifact ") + artifact);
    }

    // Hour-of-week mean straight from the feed's generating formula.
    const auto options = scenario::ScenarioOptions::defaults(root);
    const auto start = parse_timestamp("2021-11-01T00:00:00Z");
    const auto probe_hour = std::chrono::duration_cast<std::chrono::hours>(options.probe_at - start).count();
    const int cell = static_cast<int>(((probe_hour % 168) + 168) % 168);
    const int station = options.probe_station.ends_with("-01") ? 0 : 1;
    double sum = 0;
    int n = 0;
    for (int i = cell; i < 7 * 24; i += 168) {
      sum += bike_feed_value(station, i);
      ++n;
    }
    const double oracle = sum / n;
    const auto* predict = last.find("predict");
    expect(predict != nullptr, "no predict step");
    const double got = predict->detail.at("response").at("predictedAvailableBikes").get<double>();
    expect(got == oracle, "prediction " + std::to_string(got) + " != oracle " + std::to_string(oracle));
    const auto* query = last.find("portal-query");
    expect(query && query->detail.at("rows").size() == 1, "query step did not return one row");
    fs::remove_all(root);
    std::ostringstream out;
    out << last.steps.size() << " steps over 6 phases, identical reports, prediction " << got << " == oracle "
        << oracle;
    return out.str();
  });
}

std::vector<Criterion> acceptance_criteria() {
  return {
      {1, "Listing reproduction (transform)", 1s, [] { return transform_listing(); }},
      {2, "Listing reproduction (DCAT-AP)", 1s, [] { return dcat_ap_listing(); }},
      {3, "Listing reproduction (SPARQL)", 1s, [] { return sparql_listing(); }},
      {4, "MQA distribution arithmetic", 1s, [] { return mqa_distribution(); }},
      {5, "Publish-subscribe contract", 30s, [] { return publish_subscribe_contract(); }},
      {6, "Query-engine oracle equivalence", 60s, [] { return query_oracle_equivalence(); }},
      {7, "Round-trip suites", 60s, [] { return round_trips(); }},
      {8, "Idempotence and conservation", 60s, [] { return idempotence_and_conservation(); }},
      {9, "MQA differential property", 10s, [] { return mqa_differential(); }},
      {10, "End-to-end scenario", 120s, [] { return end_to_end_scenario(); }},
  };
}

}  // namespace lodbridge::testing
