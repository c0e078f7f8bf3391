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

#include "lodbridge/scenario/scenario.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>
#include <spdlog/sinks/ringbuffer_sink.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/broker/server.hpp"
#include "lodbridge/catalog/catalog.hpp"
#include "lodbridge/catalog/server.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/http.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/consumer/service.hpp"
#include "lodbridge/dataflow/pipeline.hpp"
#include "lodbridge/dcat/graph.hpp"
#include "lodbridge/dcat/shapes.hpp"
#include "lodbridge/harvester/sparql.hpp"
#include "lodbridge/harvester/store.hpp"
#include "lodbridge/historian/server.hpp"
#include "lodbridge/mqa/mqa.hpp"

namespace lodbridge::scenario {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

ScenarioOptions ScenarioOptions::defaults(fs::path workdir) {
  ScenarioOptions o;
  o.workdir = std::move(workdir);
  o.fixtures_dir = LODBRIDGE_FIXTURES_DIR;
  o.clock_start = parse_timestamp("2021-11-10T16:00:00Z");
  o.probe_at = parse_timestamp("2021-11-18T08:00:00Z");
  return o;
}

const StepResult* ScenarioReport::find(const std::string& name) const {
  for (const auto& s : steps) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Json ScenarioReport::to_json() const {
  Json out = Json::array();
  for (const auto& s : steps) {
    Json step = {{"name", s.name}, {"phase", s.phase}, {"passed", s.passed}, {"detail", s.detail}};
    if (!s.passed) {
      step["error"] = s.error;
      step["logs"] = s.logs;
    }
    out.push_back(std::move(step));
  }
  return {{"scenario", "santander"}, {"passed", passed}, {"steps", out}};
}

Json ScenarioReport::timings() const {
  Json out = Json::object();
  for (const auto& s : steps) out[s.name] = s.duration_ms;
  return out;
}

double feed_cell_mean(const fs::path& feed, const std::string& station, Timestamp at) {
  auto cell = [](Timestamp t) {
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(t.time_since_epoch()).count();
    const auto days = secs >= 0 ? secs / 86400 : (secs - 86399) / 86400;
    const auto weekday = ((days + 3) % 7 + 7) % 7;  // 1970-01-01 was a Thursday
    return static_cast<int>(weekday * 24 + (secs - days * 86400) / 3600);
  };
  const int target = cell(at);
  double sum = 0;
  int n = 0;
  std::ifstream in(feed);
  for (std::string line; std::getline(in, line);) {
    if (text::trim(line).empty()) continue;
    const auto doc = parse_json(line);
    if (doc.at("id") != station) continue;
    if (cell(parse_timestamp(doc.at("dateObserved").get<std::string>())) != target) continue;
    sum += doc.at("availableBikeNumber").get<double>();
    ++n;
  }
  if (n == 0) throw Error(Errc::unknown_station, "no feed rows for " + station + " in that hour of week");
  return sum / n;
}

namespace {

void require(bool condition, const std::string& what) {
  if (!condition) throw Error(Errc::validation, "check failed: " + what);
}

void send_tcp_line(int port, const std::string& line) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw Error(Errc::io, "socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd);
    throw Error(Errc::unavailable, "cannot connect to device gateway tcp port");
  }
  const auto msg = line + "\n";
  ::send(fd, msg.data(), msg.size(), MSG_NOSIGNAL);
  std::string reply;
  char c = 0;
  while (::recv(fd, &c, 1, 0) == 1 && c != '\n') reply += c;
  ::close(fd);
  if (reply != "OK") throw Error(Errc::validation, "device gateway answered '" + reply + "'");
}

class Run {
 public:
  explicit Run(const ScenarioOptions& options)
      : opts_(options), clock_(std::make_shared<ManualClock>(options.clock_start)) {}

  ~Run() { teardown(); }

  ScenarioReport execute() {
    auto sink = std::make_shared<spdlog::sinks::ringbuffer_sink_mt>(64);
    auto logger = spdlog::default_logger();
    logger->sinks().push_back(sink);

    const std::vector<std::tuple<std::string, std::string, std::function<Json()>>> steps = {
        {"load-fixtures", kCreation, [this] { return load_fixtures(); }},
        {"start-services", kCreation, [this] { return start_services(); }},
        {"wire-publication", kPublication, [this] { return wire_publication(); }},
        {"provider-pipeline", kHarmonization, [this] { return provider_pipeline(); }},
        {"weather-golden", kHarmonization, [this] { return weather_golden(); }},
        {"publish-catalog", kPublication, [this] { return publish_catalog(); }},
        {"export-dcat-ap", kPublication, [this] { return export_dcat_ap(); }},
        {"mqa-score", kCuration, [this] { return mqa_score(); }},
        {"harvest", kDiscovery, [this] { return harvest(); }},
        {"portal-query", kDiscovery, [this] { return portal_query(); }},
        {"train-baseline", kExploitation, [this] { return train(); }},
        {"predict", kExploitation, [this] { return predict(); }},
    };
    ScenarioReport report;
    report.passed = true;
    for (const auto& [name, phase, fn] : steps) {
      StepResult r;
      r.name = name;
      r.phase = phase;
      const auto started = std::chrono::steady_clock::now();
      try {
        r.detail = fn();
        r.passed = true;
      } catch (const std::exception& e) {
        r.error = e.what();
        spdlog::error("scenario step {} failed: {}", name, e.what());
        r.logs = sink->last_formatted();
      }
      r.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
      report.steps.push_back(std::move(r));
      if (!report.steps.back().passed) {
        report.passed = false;
        break;
      }
    }
    teardown();
    auto& sinks = logger->sinks();
    sinks.erase(std::remove(sinks.begin(), sinks.end(), sink), sinks.end());

    write_text_file((opts_.workdir / "scenario-report.json").string(), report.to_json().dump(2) + "\n");
    write_text_file((opts_.workdir / "scenario-timings.json").string(), report.timings().dump(2) + "\n");
    return report;
  }

 private:
  fs::path fixture(const std::string& rel) const { return opts_.fixtures_dir / rel; }
  fs::path work(const std::string& rel) const { return opts_.workdir / rel; }

  Json load_fixtures() {
    const auto sums_path = fixture("SHA256SUMS");
    if (!fs::exists(sums_path)) throw Error(Errc::not_found, "no SHA256SUMS in " + opts_.fixtures_dir.string());
    std::size_t checked = 0;
    std::istringstream sums(read_text_file(sums_path.string()));
    for (std::string line; std::getline(sums, line);) {
      if (text::trim(line).empty()) continue;
      const auto space = line.find("  ");
      if (space == std::string::npos) throw Error(Errc::malformed, "bad SHA256SUMS line: " + line);
      const auto expected = line.substr(0, space);
      const auto rel = line.substr(space + 2);
      const auto actual = text::hex_sha256(read_text_file(fixture(rel).string()));
      if (actual != expected) throw Error(Errc::validation, "checksum mismatch for " + rel);
      ++checked;
    }
    require(checked > 0, "SHA256SUMS lists fixtures");

    aemet_ = read_text_file(fixture("aemet.json").string());
    parse_json(aemet_);
    measures_ = read_json_file(fixture("device-measures.json").string());
    std::istringstream feed(read_text_file(fixture("bike-feed.jsonl").string()));
    for (std::string line; std::getline(feed, line);) {
      if (!text::trim(line).empty()) bike_lines_.push_back(line);
    }
    portal_ttl_ = read_text_file(fixture("portal/catalog.ttl").string());
    const auto portal = dcat::parse_turtle(portal_ttl_);
    query_text_ = read_text_file(fixture("bicycle-query.rq").string());
    harvester::parse_query(query_text_);
    golden_ = read_json_file(fixture("entities/weather-observed.json").string());
    return {{"checksummedFiles", checked},
            {"deviceMeasures", measures_.size()},
            {"bikeFeedRecords", bike_lines_.size()},
            {"portalDatasets", harvester::dataset_iris(portal).size()}};
  }

  Json start_services() {
    fs::create_directories(opts_.workdir);
    const auto& templates = entity::TemplateRegistry::builtin();
    broker::BrokerConfig bc;
    bc.templates = &templates;
    broker_ = std::make_unique<broker::Broker>(bc, clock_, std::make_shared<broker::HttpNotificationSender>());
    broker_->start_dispatcher();
    broker_server_ = std::make_unique<broker::BrokerServer>(*broker_, &templates);
    broker_server_->start();

    portal_identity_ = {kCatalogPublicBase, "LOD Bridge Santander", "Open data published by the Santander providers",
                        "LOD Bridge Santander"};
    catalog_ = std::make_unique<catalog::Catalog>(work("catalog-data"), clock_);
    catalog_server_ = std::make_unique<catalog::CatalogServer>(*catalog_, portal_identity_);
    catalog_server_->start();

    historian_ = std::make_unique<historian::Historian>(work("history"), clock_);
    historian_server_ = std::make_unique<historian::HistorianServer>(*historian_);
    historian_server_->start();

    stubs_ = std::make_unique<http::Server>();
    stubs_->routes().Get("/aemet/santander", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(aemet_, "application/json");
    });
    stubs_->routes().Get("/portal/catalog.ttl", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(portal_ttl_, "text/turtle");
    });
    stubs_->start();
    return {{"services", {"broker", "catalog", "historian", "aemet-stub", "portal-stub"}}};
  }

  std::map<std::string, std::string> vars() const {
    return {{"aemetUrl", stubs_->base_url() + "/aemet/santander"},
            {"brokerUrl", broker_server_->base_url()},
            {"catalogUrl", catalog_server_->base_url()},
            {"brokerPublicUrl", kBrokerPublicBase}};
  }

  Json wire_publication() {
    auto config = dataflow::PipelineConfig::load(fixture("pipelines/publisher.yaml"), vars());
    config.dead_letter_dir = work("dlq");
    dataflow::Services services;
    services.clock = clock_;
    services.historian = historian_.get();
    publisher_ = std::make_unique<dataflow::PipelineRunner>(config, services);
    publisher_->start();

    broker::Subscription entities;
    entities.entity_types = {"WeatherObserved", "TrafficFlowObserved"};
    entities.endpoint = publisher_->endpoint("entity-notifications") + "/ingest/entities";
    broker::Subscription history;
    history.entity_types = {"BikeHireDockingStation"};
    history.watched_attributes = {"availableBikeNumber"};
    history.endpoint = publisher_->endpoint("history-notifications") + "/ingest/history";
    const auto a = broker_->create_subscription(entities);
    const auto b = broker_->create_subscription(history);
    return {{"pipeline", config.name}, {"processors", config.processors.size()}, {"subscriptions", {a, b}}};
  }

  Json provider_pipeline() {
    auto config = dataflow::PipelineConfig::load(fixture("pipelines/provider.yaml"), vars());
    config.dead_letter_dir = work("dlq");
    dataflow::Services services;
    services.clock = clock_;
    services.templates = &entity::TemplateRegistry::builtin();
    dataflow::PipelineRunner runner(config, services);
    runner.start();

    // The last measure goes over the TCP line protocol.
    const auto gateway = runner.endpoint("traffic-gateway");
    for (std::size_t i = 0; i < measures_.size(); ++i) {
      const auto& m = measures_[i];
      const auto dev = m.at("dev").get<std::string>();
      if (i + 1 == measures_.size()) {
        send_tcp_line(runner.tcp_port("traffic-gateway"), "devices/" + dev + "/measures " + dump_compact(m));
        continue;
      }
      const auto res = http::post(gateway + "/devices/" + dev + "/measures", dump_compact(m));
      require(res.status == 202, "device measure accepted");
    }
    const auto feed = runner.endpoint("bike-feed") + "/ingest/bike-feed";
    for (const auto& line : bike_lines_) {
      const auto res = http::post(feed, line);
      require(res.status == 202, "bike feed record accepted");
    }
    require(runner.wait_idle(500ms, 120s), "provider pipeline goes idle");
    const auto report = runner.stop();
    require(report.conserved(), "provider records conserved");
    require(report.dead_lettered == 0, "no provider record dead-lettered");
    return {{"sourced", report.sourced},
            {"completed", report.completed},
            {"deadLettered", report.dead_lettered},
            {"conserved", report.conserved()},
            {"connections", report.to_json().at("connections")},
            {"brokerEntities", broker_->entity_count()}};
  }

  Json weather_golden() {
    const auto doc = broker_->get_document(entity::EntityId("urn:WeatherObserved:Santander"),
                                           entity::Representation::key_values);
    const auto got = canonical_dump(doc);
    const auto want = canonical_dump(golden_);
    require(got == want, "WeatherObserved keyValues equals the golden listing");
    return {{"entity", "urn:WeatherObserved:Santander"}, {"canonical", got}};
  }

  Json publish_catalog() {
    require(broker_->wait_idle(120s), "broker notifications delivered");
    require(publisher_->wait_idle(500ms, 120s), "publisher pipeline goes idle");
    const auto report = publisher_->stop();
    require(report.conserved(), "publisher records conserved");
    require(report.dead_lettered == 0, "no publisher record dead-lettered");
    require(broker_->dead_letters().empty(), "no notification dead-lettered");

    Json datasets = Json::object();
    for (const auto& ds : catalog_->datasets()) {
      Json resources = Json::array();
      for (const auto& r : ds.resources) resources.push_back(r.id);
      datasets[ds.id] = {{"title", ds.title}, {"organization", ds.organization_id}, {"resources", resources}};
    }
    const auto weather = catalog_->find_dataset("santander-aemet-weather");
    require(weather.has_value(), "weather dataset published");
    require(weather->resources.size() == 1, "weather dataset has one resource");
    require(weather->resources.front().title == "Santander WeatherObserved Entity", "weather resource title");
    const auto traffic = catalog_->find_dataset("santander-traffic-flow");
    require(traffic.has_value() && traffic->resources.size() == 3, "traffic dataset has three resources");
    require(historian_->size() > 0, "historian received bike history");
    return {{"organizations", catalog_->organizations().size()},
            {"datasets", datasets},
            {"historyRecords", historian_->size()},
            {"publisherRecords", report.sourced}};
  }

  Json export_dcat_ap() {
    fs::create_directories(work("exports"));
    const auto catalog_rdf =
        catalog::export_catalog(*catalog_, portal_identity_, dcat::Profile::dcat_ap, dcat::Format::rdfxml);
    write_text_file(work("exports/catalog.rdf").string(), catalog_rdf);
    const auto weather_rdf = catalog::export_dataset(*catalog_, "santander-aemet-weather", portal_identity_,
                                                     dcat::Profile::dcat_ap, dcat::Format::rdfxml);
    write_text_file(work("exports/santander-aemet-weather.rdf").string(), weather_rdf);

    const auto g = dcat::parse_rdfxml(weather_rdf);
    const auto title = dcat::Term::iri(dcat::expand("dct:title"));
    const auto desc = dcat::Term::iri(dcat::expand("dct:description"));
    require(!g.match(std::nullopt, title, dcat::Term::literal("Santander AEMET Weather")).empty(), "dataset title");
    require(!g.match(std::nullopt, desc, dcat::Term::literal("Santander weather in real time")).empty(),
            "dataset description");
    require(!g.match(std::nullopt, title, dcat::Term::literal("Santander WeatherObserved Entity")).empty(),
            "distribution title");
    require(dcat::isomorphic(g, dcat::parse_rdfxml(dcat::serialize_rdfxml(g))), "RDF/XML round trip");
    const auto conformance = dcat::validate_shapes(g, dcat::ShapeSet::bundled());
    require(conformance.conforms(), "weather export conforms to the bundled shapes");
    catalog_graph_ = dcat::parse_rdfxml(catalog_rdf);
    const auto catalog_conformance = dcat::validate_shapes(catalog_graph_, dcat::ShapeSet::bundled());
    require(catalog_conformance.conforms(), "catalog export conforms to the bundled shapes");
    return {{"catalogTriples", catalog_graph_.size()},
            {"weatherTriples", g.size()},
            {"datasets", mqa::dataset_iris(catalog_graph_)},
            {"conforms", true}};
  }

  Json mqa_score() {
    const mqa::StatusMapUrlChecker urls;
    std::vector<mqa::ScoreReport> reports;
    Json per_dataset = Json::object();
    Json full = Json::array();
    for (const auto& iri : mqa::dataset_iris(catalog_graph_)) {
      reports.push_back(mqa::score_dataset(catalog_graph_, iri, mqa::MqaConfig::defaults(), urls));
      per_dataset[iri] = {{"total", reports.back().total}, {"rating", mqa::to_string(reports.back().rating)}};
      full.push_back(reports.back().to_json());
    }
    require(!reports.empty(), "catalog has datasets to score");
    const auto distribution = mqa::score_catalog(reports);
    write_text_file(work("mqa-report.json").string(),
                    Json{{"datasets", full}, {"distribution", distribution.to_json()}}.dump(2) + "\n");
    return {{"datasets", per_dataset}, {"distribution", distribution.to_json()}};
  }

  Json harvest() {
    store_ = std::make_unique<harvester::NamedGraphStore>(work("harvest-store"), clock_);
    store_->add_source({"santander-portal", stubs_->base_url() + "/portal/catalog.ttl", dcat::Format::turtle, {}});
    store_->add_source(
        {"lodbridge-catalog", catalog_server_->base_url() + "/catalog.rdf?profile=dcat_ap", dcat::Format::rdfxml, {}});
    Json out = Json::object();
    for (const auto& id : {"santander-portal", "lodbridge-catalog"}) {
      const auto r = store_->harvest(id);
      require(r.ok, std::string("harvest of ") + id + ": " + r.error);
      out[id] = {{"added", r.added}, {"datasets", harvester::dataset_iris(*store_->graph(id))}};
    }
    return out;
  }

  Json portal_query() {
    const auto plan = harvester::parse_query(query_text_);
    const auto result = harvester::execute_query(plan, store_->union_graph());
    write_text_file(work("query-result.json").string(), result.to_json().dump(2) + "\n");
    require(result.rows.size() == 1, "portal query returns exactly one row");
    require(result.rows.front().front() == dcat::Term::iri(kBikeDatasetIri), "row is the bike dataset");
    return {{"rows", result.to_json().at("results").at("bindings")}};
  }

  Json train() {
    broker_client_ = std::make_unique<broker::LocalBrokerClient>(*broker_);
    consumer_ = std::make_unique<consumer::ConsumerService>(
        *broker_client_, consumer::historian_http_source(historian_server_->base_url()), clock_);
    const auto n = consumer_->train();
    require(n == bike_lines_.size(), "trained on every bike feed record");
    const auto& model = consumer_->predictor()->model();
    return {{"trainedOn", n}, {"cells", model.table.size()}, {"stations", model.station_means.size()}};
  }

  Json predict() {
    consumer_->start();
    const auto url = consumer_->base_url() + "/predict?station=" + text::url_encode(opts_.probe_station) +
                     "&at=" + text::url_encode(format_utc(opts_.probe_at));
    const auto res = http::get(url);
    require(res.status == 200, "prediction endpoint answers 200");
    const auto body = parse_json(res.body);
    const double oracle = feed_cell_mean(fixture("bike-feed.jsonl"), opts_.probe_station, opts_.probe_at);
    const double got = body.at("predictedAvailableBikes").get<double>();
    require(got == oracle, "prediction equals the group-by-mean oracle");
    const auto log = consumer_->request_log();
    require(!log.empty(), "request logged");
    const auto& steps = log.back().steps;
    require(steps.size() >= 4 && steps[0] == "request" && steps[1].rfind("collect_latest", 0) == 0 &&
                steps[2].rfind("predict", 0) == 0 && steps[3] == "response",
            "request -> collect_latest -> predict -> response");
    return {{"response", body}, {"oracle", oracle}, {"requestLog", log.back().to_json()}};
  }

  void teardown() {
    if (consumer_) consumer_->stop();
    if (publisher_) publisher_->stop();
    if (broker_) {
      broker_->stop_dispatcher();
      try {
        broker_->save_snapshot(work("broker-snapshot.json").string());
      } catch (const std::exception& e) {
        spdlog::warn("broker snapshot not written: {}", e.what());
      }
    }
    if (stubs_) stubs_->stop();
    if (historian_server_) historian_server_->stop();
    if (catalog_server_) catalog_server_->stop();
    if (broker_server_) broker_server_->stop();
    consumer_.reset();
    publisher_.reset();
    broker_server_.reset();
    broker_.reset();
  }

  ScenarioOptions opts_;
  std::shared_ptr<ManualClock> clock_;

  std::string aemet_;
  Json measures_;
  std::vector<std::string> bike_lines_;
  std::string portal_ttl_;
  std::string query_text_;
  Json golden_;

  std::unique_ptr<broker::Broker> broker_;
  std::unique_ptr<broker::BrokerServer> broker_server_;
  dcat::PortalIdentity portal_identity_;
  std::unique_ptr<catalog::Catalog> catalog_;
  std::unique_ptr<catalog::CatalogServer> catalog_server_;
  std::unique_ptr<historian::Historian> historian_;
  std::unique_ptr<historian::HistorianServer> historian_server_;
  std::unique_ptr<http::Server> stubs_;
  std::unique_ptr<dataflow::PipelineRunner> publisher_;
  dcat::Graph catalog_graph_;
  std::unique_ptr<harvester::NamedGraphStore> store_;
  std::unique_ptr<broker::LocalBrokerClient> broker_client_;
  std::unique_ptr<consumer::ConsumerService> consumer_;
};

}  // namespace

ScenarioReport run_scenario(const ScenarioOptions& options) {
  fs::create_directories(options.workdir);
  Run run(options);
  return run.execute();
}

}  // namespace lodbridge::scenario
