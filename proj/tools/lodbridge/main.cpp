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

#include <csignal>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "lodbridge/broker/broker.hpp"
#include "lodbridge/broker/server.hpp"
#include "lodbridge/catalog/catalog.hpp"
#include "lodbridge/catalog/server.hpp"
#include "lodbridge/common/error.hpp"
#include "lodbridge/common/json.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/consumer/service.hpp"
#include "lodbridge/dataflow/pipeline.hpp"
#include "lodbridge/entity/templates.hpp"
#include "lodbridge/harvester/sparql.hpp"
#include "lodbridge/harvester/store.hpp"
#include "lodbridge/historian/historian.hpp"
#include "lodbridge/historian/server.hpp"
#include "lodbridge/mqa/mqa.hpp"
#include "lodbridge/scenario/scenario.hpp"

namespace lb = lodbridge;
namespace fs = std::filesystem;

namespace {

struct Settings {
  std::string host = "127.0.0.1";
  int broker_port = 1026;
  int catalog_port = 5000;
  int historian_port = 8668;
  int consumer_port = 8080;
  std::string data_dir = "lodbridge-data";

  void apply(const lb::Json& doc) {
    host = doc.value("host", host);
    broker_port = doc.value("brokerPort", broker_port);
    catalog_port = doc.value("catalogPort", catalog_port);
    historian_port = doc.value("historianPort", historian_port);
    consumer_port = doc.value("consumerPort", consumer_port);
    data_dir = doc.value("dataDir", data_dir);
  }

  void ports_from(int base) {
    broker_port = base;
    catalog_port = base + 1;
    historian_port = base + 2;
    consumer_port = base + 3;
  }
};

sigset_t stop_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  return set;
}

void wait_for_signal() {
  auto set = stop_signals();
  int sig = 0;
  sigwait(&set, &sig);
  spdlog::info("signal {} received, shutting down", sig);
}

lb::Json load_config(const std::string& path) {
  const auto text = lb::read_text_file(path);
  const auto ext = fs::path(path).extension().string();
  if (ext == ".yaml" || ext == ".yml") return lb::dataflow::yaml_to_json(text);
  return lb::parse_json(text);
}

std::map<std::string, std::string> parse_vars(const std::vector<std::string>& items) {
  std::map<std::string, std::string> vars;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--var", "expected name=value, got " + item);
    vars[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return vars;
}

lb::dcat::Format format_for(const std::string& path, const std::string& name) {
  if (!name.empty()) {
    if (auto f = lb::dcat::format_from_name(name)) return *f;
    throw lb::Error(lb::Errc::invalid_argument, "unknown RDF format " + name);
  }
  const auto ext = fs::path(path).extension().string();
  return ext == ".ttl" ? lb::dcat::Format::turtle : lb::dcat::Format::rdfxml;
}

}  // namespace

int main(int argc, char** argv) {
  // Servers run on worker threads; only the main thread takes stop signals.
  auto signals = stop_signals();
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  CLI::App app{"lodbridge: IoT to linked open data bridge"};
  app.require_subcommand(1);
  Settings settings;
  std::string config_path;
  std::string log_level = "info";
  int ports_base = 0;
  app.add_option("--config", config_path, "YAML or JSON settings file")->check(CLI::ExistingFile);
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--ports-base", ports_base, "broker, catalog, historian and consumer ports start here")
      ->check(CLI::Range(1, 65532));

  std::function<int()> action;

  // broker
  auto* broker_cmd = app.add_subcommand("broker", "NGSI-LD context broker")->require_subcommand(1);
  auto* broker_serve = broker_cmd->add_subcommand("serve", "serve the NGSI-LD API");
  std::string snapshot;
  broker_serve->add_option("--snapshot", snapshot, "load on start, save on shutdown");
  broker_serve->callback([&] {
    action = [&] {
      lb::broker::BrokerConfig cfg;
      cfg.templates = &lb::entity::TemplateRegistry::builtin();
      lb::broker::Broker broker(cfg, lb::system_clock(), std::make_shared<lb::broker::HttpNotificationSender>());
      if (!snapshot.empty() && fs::exists(snapshot)) broker.load_snapshot(snapshot);
      broker.start_dispatcher();
      lb::broker::BrokerServer server(broker, cfg.templates);
      server.start(settings.host, settings.broker_port);
      spdlog::info("broker listening on {}", server.base_url());
      wait_for_signal();
      server.stop();
      broker.stop_dispatcher();
      if (!snapshot.empty()) broker.save_snapshot(snapshot);
      return 0;
    };
  });

  // catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "open data catalog")->require_subcommand(1);
  auto* catalog_serve = catalog_cmd->add_subcommand("serve", "serve the catalog action API and DCAT exports");
  std::string public_base;
  catalog_serve->add_option("--public-base", public_base, "public base URL used in exported IRIs");
  catalog_serve->callback([&] {
    action = [&] {
      lb::catalog::Catalog cat(fs::path(settings.data_dir) / "catalog");
      const auto base = public_base.empty()
                            ? "http://" + settings.host + ":" + std::to_string(settings.catalog_port)
                            : public_base;
      lb::dcat::PortalIdentity portal{base, "LOD Bridge catalog", "Datasets published through LOD Bridge",
                                      "LOD Bridge"};
      lb::catalog::CatalogServer server(cat, portal);
      server.start(settings.host, settings.catalog_port);
      spdlog::info("catalog listening on {}", server.base_url());
      wait_for_signal();
      server.stop();
      return 0;
    };
  });

  // historian
  auto* hist_cmd = app.add_subcommand("hist", "attribute history")->require_subcommand(1);
  auto* hist_serve = hist_cmd->add_subcommand("serve", "accept broker notifications");
  hist_serve->callback([&] {
    action = [&] {
      lb::historian::Historian hist(fs::path(settings.data_dir) / "history");
      lb::historian::HistorianServer server(hist);
      server.start(settings.host, settings.historian_port);
      spdlog::info("historian listening on {}", server.base_url());
      wait_for_signal();
      server.stop();
      return 0;
    };
  });
  auto* hist_query = hist_cmd->add_subcommand("query", "records of one attribute in [from, to)");
  std::string hq_entity, hq_attr, hq_from, hq_to;
  hist_query->add_option("--entity", hq_entity)->required();
  hist_query->add_option("--attr", hq_attr)->required();
  hist_query->add_option("--from", hq_from)->required();
  hist_query->add_option("--to", hq_to)->required();
  hist_query->callback([&] {
    action = [&] {
      lb::historian::Historian hist(fs::path(settings.data_dir) / "history");
      const auto rows = hist.query(hq_entity, hq_attr, lb::parse_timestamp(hq_from), lb::parse_timestamp(hq_to));
      std::cout << lb::historian::render(rows, lb::historian::ExportFormat::jsonl);
      return 0;
    };
  });
  auto* hist_export = hist_cmd->add_subcommand("export", "export every record");
  std::string he_format = "csv", he_out;
  hist_export->add_option("--format", he_format)->check(CLI::IsMember({"csv", "jsonl"}));
  hist_export->add_option("-o,--output", he_out, "file to write; stdout when absent");
  hist_export->callback([&] {
    action = [&] {
      lb::historian::Historian hist(fs::path(settings.data_dir) / "history");
      const auto fmt = he_format == "csv" ? lb::historian::ExportFormat::csv : lb::historian::ExportFormat::jsonl;
      if (he_out.empty()) {
        std::cout << lb::historian::render(hist.records(), fmt);
      } else {
        spdlog::info("wrote {} records to {}", hist.export_to(he_out, fmt), he_out);
      }
      return 0;
    };
  });

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "dataflow pipelines")->require_subcommand(1);
  auto* flow_run = flow_cmd->add_subcommand("run", "run a pipeline until idle or for a duration");
  std::string flow_config;
  std::vector<std::string> flow_vars;
  double flow_duration = 0;
  std::string flow_dlq;
  bool flow_history = false;
  flow_run->add_option("-c,--config", flow_config, "pipeline YAML or JSON")->required()->check(CLI::ExistingFile);
  flow_run->add_option("--var", flow_vars, "name=value substituted for ${name}");
  flow_run->add_option("--duration", flow_duration, "seconds to run; 0 runs until idle")->check(CLI::NonNegativeNumber);
  flow_run->add_option("--dead-letter-dir", flow_dlq);
  flow_run->add_flag("--with-historian", flow_history, "open the historian under the data dir");
  flow_run->callback([&] {
    action = [&] {
      auto config = lb::dataflow::PipelineConfig::load(flow_config, parse_vars(flow_vars));
      if (!flow_dlq.empty()) config.dead_letter_dir = flow_dlq;
      std::unique_ptr<lb::historian::Historian> hist;
      lb::dataflow::Services services;
      services.templates = &lb::entity::TemplateRegistry::builtin();
      if (flow_history) {
        hist = std::make_unique<lb::historian::Historian>(fs::path(settings.data_dir) / "history");
        services.historian = hist.get();
      }
      lb::dataflow::RunOptions options;
      if (flow_duration > 0) {
        options.mode = lb::dataflow::StopMode::duration;
        options.duration = std::chrono::milliseconds(static_cast<long long>(flow_duration * 1000));
      }
      const auto report = lb::dataflow::run_pipeline(config, services, options);
      std::cout << report.to_json().dump(2) << "\n";
      return report.conserved() && report.dead_lettered == 0 ? 0 : 1;
    };
  });

  // mqa
  auto* mqa_cmd = app.add_subcommand("mqa", "metadata quality assessment")->require_subcommand(1);
  auto* mqa_score = mqa_cmd->add_subcommand("score", "score every dataset in a DCAT document");
  std::string mqa_file, mqa_format, mqa_urls, mqa_config;
  bool mqa_table = false, mqa_live = false;
  mqa_score->add_option("file", mqa_file)->required()->check(CLI::ExistingFile);
  mqa_score->add_option("--format", mqa_format, "turtle or rdfxml; guessed from the extension");
  mqa_score->add_option("--url-status", mqa_urls, "JSON map of URL to HTTP status")->check(CLI::ExistingFile);
  mqa_score->add_option("--weights", mqa_config, "indicator table")->check(CLI::ExistingFile);
  mqa_score->add_flag("--check-urls", mqa_live, "issue real requests for URL checks");
  mqa_score->add_flag("--table", mqa_table, "human-readable table instead of JSON");
  mqa_score->callback([&] {
    action = [&] {
      const auto g = lb::dcat::parse(lb::read_text_file(mqa_file), format_for(mqa_file, mqa_format));
      const auto config = mqa_config.empty() ? lb::mqa::MqaConfig::defaults() : lb::mqa::MqaConfig::load(mqa_config);
      std::unique_ptr<lb::mqa::UrlChecker> urls;
      if (mqa_live) {
        urls = std::make_unique<lb::mqa::HttpUrlChecker>();
      } else if (!mqa_urls.empty()) {
        urls = std::make_unique<lb::mqa::StatusMapUrlChecker>(lb::mqa::StatusMapUrlChecker::load(mqa_urls));
      } else {
        urls = std::make_unique<lb::mqa::StatusMapUrlChecker>();
      }
      std::vector<lb::mqa::ScoreReport> reports;
      for (const auto& iri : lb::mqa::dataset_iris(g)) reports.push_back(lb::mqa::score_dataset(g, iri, config, *urls));
      const auto dist = lb::mqa::score_catalog(reports);
      if (mqa_table) {
        for (const auto& r : reports) std::cout << r.to_table() << "\n";
      } else {
        lb::Json out = lb::Json::array();
        for (const auto& r : reports) out.push_back(r.to_json());
        std::cout << lb::Json{{"datasets", out}, {"distribution", dist.to_json()}}.dump(2) << "\n";
      }
      return 0;
    };
  });

  // harvest
  auto* harvest_cmd = app.add_subcommand("harvest", "harvest remote catalogs")->require_subcommand(1);
  std::string store_dir;
  auto store_path = [&] { return store_dir.empty() ? fs::path(settings.data_dir) / "harvest" : fs::path(store_dir); };
  auto* harvest_add = harvest_cmd->add_subcommand("add", "register a source portal");
  std::string ha_id, ha_endpoint, ha_format = "rdfxml";
  harvest_add->add_option("--store", store_dir);
  harvest_add->add_option("--id", ha_id)->required();
  harvest_add->add_option("--endpoint", ha_endpoint)->required();
  harvest_add->add_option("--format", ha_format)->check(CLI::IsMember({"rdfxml", "turtle"}));
  harvest_add->callback([&] {
    action = [&] {
      lb::harvester::NamedGraphStore store(store_path());
      store.add_source({ha_id, ha_endpoint, *lb::dcat::format_from_name(ha_format), std::nullopt});
      return 0;
    };
  });
  auto* harvest_run = harvest_cmd->add_subcommand("run", "harvest one or every source");
  std::string hr_id;
  harvest_run->add_option("--store", store_dir);
  harvest_run->add_option("--id", hr_id);
  harvest_run->callback([&] {
    action = [&] {
      lb::harvester::NamedGraphStore store(store_path());
      int rc = 0;
      for (const auto& src : store.sources()) {
        if (!hr_id.empty() && src.id != hr_id) continue;
        const auto report = store.harvest(src.id);
        std::cout << report.to_json().dump() << "\n";
        if (!report.ok) rc = 1;
      }
      return rc;
    };
  });

  // query
  auto* query_cmd = app.add_subcommand("query", "run a SPARQL SELECT over harvested graphs");
  std::string query_file;
  bool query_json = false;
  query_cmd->add_option("file", query_file)->required()->check(CLI::ExistingFile);
  query_cmd->add_option("--store", store_dir);
  query_cmd->add_flag("--json", query_json);
  query_cmd->callback([&] {
    action = [&] {
      lb::harvester::NamedGraphStore store(store_path());
      const auto plan = lb::harvester::parse_query(lb::read_text_file(query_file));
      const auto result = lb::harvester::execute_query(plan, store.union_graph());
      std::cout << (query_json ? result.to_json().dump(2) + "\n" : result.to_table());
      return 0;
    };
  });

  // consumer
  auto* consumer_cmd = app.add_subcommand("consumer", "bike availability predictor")->require_subcommand(1);
  auto* consumer_serve = consumer_cmd->add_subcommand("serve", "train and serve predictions");
  std::string broker_url, historian_url;
  consumer_serve->add_option("--broker", broker_url)->required();
  consumer_serve->add_option("--historian", historian_url)->required();
  consumer_serve->callback([&] {
    action = [&] {
      lb::broker::HttpBrokerClient broker(broker_url);
      lb::consumer::ConsumerService service(broker, lb::consumer::historian_http_source(historian_url));
      try {
        spdlog::info("trained on {} records", service.train());
      } catch (const lb::Error& e) {
        spdlog::warn("initial training failed: {}; POST /train later", e.what());
      }
      service.start(settings.host, settings.consumer_port);
      spdlog::info("consumer listening on {}", service.base_url());
      wait_for_signal();
      service.stop();
      return 0;
    };
  });

  // scenario
  auto* scenario_cmd = app.add_subcommand("scenario", "end-to-end Santander scenario")->require_subcommand(1);
  auto* scenario_run = scenario_cmd->add_subcommand("run", "run every phase against in-process services");
  std::string workdir;
  std::string fixtures_dir;
  scenario_run->add_option("-w,--workdir", workdir)->required();
  scenario_run->add_option("--fixtures", fixtures_dir);
  scenario_run->callback([&] {
    action = [&] {
      auto options = lb::scenario::ScenarioOptions::defaults(workdir);
      if (!fixtures_dir.empty()) options.fixtures_dir = fixtures_dir;
      const auto report = lb::scenario::run_scenario(options);
      for (const auto& s : report.steps) {
        std::cout << (s.passed ? "ok   " : "FAIL ") << s.phase << " / " << s.name;
        if (!s.passed) std::cout << ": " << s.error;
        std::cout << "\n";
      }
      return report.passed ? 0 : 1;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    spdlog::set_level(spdlog::level::from_str(log_level));
    if (!config_path.empty()) settings.apply(load_config(config_path));
    if (ports_base > 0) settings.ports_from(ports_base);
    return action();
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
