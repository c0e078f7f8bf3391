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

#include "lodbridge/dataflow/pipeline.hpp"

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <condition_variable>
#include <cstdio>
#include <functional>
#include <set>
#include <thread>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"

namespace lodbridge::dataflow {

namespace fs = std::filesystem;
using Steady = std::chrono::steady_clock;

// ---- config ---------------------------------------------------------------

const ProcessorConfig* PipelineConfig::find(const std::string& name) const {
  for (const auto& p : processors) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void PipelineConfig::check() const {
  if (queue_capacity == 0) throw Error(Errc::validation, "queueCapacity must be positive");
  std::set<std::string> names;
  for (const auto& p : processors) {
    if (p.name.empty()) throw Error(Errc::validation, "processor without a name");
    if (!names.insert(p.name).second) throw Error(Errc::validation, "duplicate processor '" + p.name + "'");
    if (!is_known_kind(p.kind)) {
      throw Error(Errc::validation, "processor '" + p.name + "': unknown kind '" + p.kind + "'");
    }
    make_processor(p, base_dir);
  }
  std::map<std::string, std::vector<std::string>> adjacency;
  for (const auto& c : connections) {
    const auto* from = find(c.from);
    const auto* to = find(c.to);
    if (from == nullptr || to == nullptr) {
      throw Error(Errc::validation, "connection " + c.from + " -> " + c.to + " names an unknown processor");
    }
    if (c.name.empty()) throw Error(Errc::validation, "connection " + c.from + " -> " + c.to + " has no name");
    if (is_source_kind(to->kind)) throw Error(Errc::validation, "source '" + c.to + "' cannot have inputs");
    adjacency[c.from].push_back(c.to);
  }
  // 0 unvisited, 1 on stack, 2 done
  std::map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    state[n] = 1;
    for (const auto& next : adjacency[n]) {
      if (state[next] == 1) throw Error(Errc::validation, "pipeline has a cycle through '" + next + "'");
      if (state[next] == 0) visit(next);
    }
    state[n] = 2;
  };
  for (const auto& p : processors) {
    if (state[p.name] == 0) visit(p.name);
  }
}

namespace {

void substitute(Json& node, const std::map<std::string, std::string>& vars) {
  if (node.is_string()) {
    auto s = node.get<std::string>();
    for (const auto& [key, value] : vars) {
      const std::string needle = "${" + key + "}";
      for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + value.size())) {
        s.replace(pos, needle.size(), value);
      }
    }
    node = s;
  } else if (node.is_structured()) {
    for (auto& child : node) substitute(child, vars);
  }
}

Json yaml_node_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined: return nullptr;
    case YAML::NodeType::Sequence: {
      Json out = Json::array();
      for (const auto& item : node) out.push_back(yaml_node_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      Json out = Json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_node_to_json(kv.second);
      return out;
    }
    case YAML::NodeType::Scalar: break;
  }
  const auto& text = node.Scalar();
  if (node.Tag() == "!") return text;  // quoted
  if (text == "true") return true;
  if (text == "false") return false;
  if (text == "null" || text == "~") return nullptr;
  try {
    std::size_t used = 0;
    const long long i = std::stoll(text, &used);
    if (used == text.size()) return i;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size()) return d;
  } catch (const std::exception&) {
  }
  return text;
}

}  // namespace

Json yaml_to_json(const std::string& yaml_text) {
  try {
    return yaml_node_to_json(YAML::Load(yaml_text));
  } catch (const YAML::Exception& e) {
    throw SyntaxError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

PipelineConfig PipelineConfig::from_json(const Json& raw, const std::map<std::string, std::string>& vars) {
  Json doc = raw;
  substitute(doc, vars);
  PipelineConfig cfg;
  try {
    cfg.name = doc.value("name", cfg.name);
    if (doc.contains("queueCapacity")) {
      const auto cap = doc.at("queueCapacity").get<long long>();
      if (cap < 1) throw Error(Errc::validation, "queueCapacity must be positive");
      cfg.queue_capacity = static_cast<std::size_t>(cap);
    }
    if (doc.contains("deadLetterDir")) cfg.dead_letter_dir = doc.at("deadLetterDir").get<std::string>();
    for (const auto& p : doc.value("processors", Json::array())) {
      ProcessorConfig pc{p.at("name").get<std::string>(), p.at("kind").get<std::string>(),
                         p.value("params", Json::object())};
      if (p.contains("outgoing")) {
        for (const auto& [rel, targets] : p.at("outgoing").items()) {
          if (targets.is_string()) {
            cfg.connections.push_back({pc.name, rel, targets.get<std::string>()});
          } else {
            for (const auto& t : targets) cfg.connections.push_back({pc.name, rel, t.get<std::string>()});
          }
        }
      }
      cfg.processors.push_back(std::move(pc));
    }
    for (const auto& c : doc.value("connections", Json::array())) {
      Connection conn;
      conn.from = c.at("from").get<std::string>();
      conn.to = c.at("to").get<std::string>();
      conn.name = c.contains("connectionName") ? c.at("connectionName").get<std::string>()
                                               : c.value("name", std::string("success"));
      cfg.connections.push_back(std::move(conn));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::validation, std::string("bad pipeline config: ") + e.what());
  }
  return cfg;
}

PipelineConfig PipelineConfig::load(const fs::path& path, const std::map<std::string, std::string>& vars) {
  const auto text = read_text_file(path.string());
  const auto ext = text::to_lower(path.extension().string());
  const Json doc = (ext == ".yaml" || ext == ".yml") ? yaml_to_json(text) : parse_json(text);
  auto cfg = from_json(doc, vars);
  cfg.base_dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  return cfg;
}

Json RunReport::to_json() const {
  Json procs = Json::object();
  for (const auto& [name, s] : processors) {
    procs[name] = {{"received", s.received},
                   {"emitted", s.emitted},
                   {"terminated", s.terminated},
                   {"failures", s.failures},
                   {"deadLettered", s.dead_lettered}};
  }
  Json conns = Json::object();
  for (const auto& [key, n] : connections) conns[key] = n;
  return {{"sourced", sourced},       {"forked", forked},          {"completed", completed},
          {"deadLettered", dead_lettered}, {"inFlight", in_flight}, {"conserved", conserved()},
          {"connections", conns},     {"processors", procs}};
}

// ---- runner ---------------------------------------------------------------

namespace {

struct Node;

struct Edge {
  Node* to = nullptr;
  std::string key;
  std::atomic<std::uint64_t> count{0};
};

}  // namespace

struct PipelineRunner::Impl {
  PipelineConfig config;
  Services services;
  std::vector<std::unique_ptr<Node>> nodes;
  std::map<std::string, Node*> by_name;

  std::atomic<std::uint64_t> sourced{0};
  std::atomic<std::uint64_t> forked{0};
  std::atomic<std::uint64_t> completed{0};
  std::atomic<std::uint64_t> dead_lettered{0};
  std::atomic<std::int64_t> in_flight{0};
  std::atomic<std::uint64_t> lineage_seq{0};
  std::atomic<Steady::rep> last_activity{0};
  std::atomic<std::size_t> sources_running{0};

  std::atomic<bool> stopping{false};
  std::atomic<bool> shutdown{false};
  std::mutex stop_mu;
  std::condition_variable stop_cv;

  bool started = false;
  bool stopped = false;
  RunReport final_report;

  void touch() { last_activity = Steady::now().time_since_epoch().count(); }
  RunReport report() const;
};

namespace {

struct Node final : ProcessorContext {
  Node(PipelineRunner::Impl& owner, ProcessorConfig cfg, std::unique_ptr<Processor> p, std::size_t capacity)
      : impl(owner), config(std::move(cfg)), proc(std::move(p)), input(capacity) {}

  const std::string& name() const override { return config.name; }
  const Services& services() const override { return impl.services; }
  const fs::path& base_dir() const override { return impl.config.base_dir; }

  FlowRecord make_record(std::string payload, std::map<std::string, std::string> attributes) override {
    char seq[32];
    std::snprintf(seq, sizeof seq, "%06llu", static_cast<unsigned long long>(++impl.lineage_seq));
    ++impl.sourced;
    ++impl.in_flight;
    impl.touch();
    return FlowRecord{std::move(payload), std::move(attributes), config.name + "-" + seq};
  }

  void emit(FlowRecord record, const std::string& relationship) override {
    ++emitted;
    impl.touch();
    auto it = out.find(relationship);
    if (it == out.end() || it->second.empty()) {
      ++terminated;
      ++impl.completed;
      --impl.in_flight;
      return;
    }
    auto& edges = it->second;
    if (edges.size() > 1) {
      impl.forked += edges.size() - 1;
      impl.in_flight += static_cast<std::int64_t>(edges.size() - 1);
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto& edge = *edges[i];
      ++edge.count;
      FlowRecord copy = (i + 1 == edges.size()) ? std::move(record) : record;
      if (!edge.to->input.push(std::move(copy))) {
        spdlog::warn("pipeline shut down before {} accepted a record", edge.key);
        --impl.in_flight;
      }
    }
  }

  void fail(FlowRecord record, const std::string& reason) override {
    ++failures;
    record.attributes["failure.reason"] = reason;
    record.attributes["failure.processor"] = config.name;
    auto it = out.find("failure");
    if (it != out.end() && !it->second.empty()) {
      emit(std::move(record), "failure");
      return;
    }
    spdlog::warn("{}: record {} dead-lettered: {}", config.name, record.lineage_id, reason);
    if (impl.config.dead_letter_dir) {
      const auto dir = *impl.config.dead_letter_dir / config.name;
      std::error_code ec;
      fs::create_directories(dir, ec);
      Json doc = {{"lineageId", record.lineage_id},
                  {"processor", config.name},
                  {"reason", reason},
                  {"attributes", record.attributes},
                  {"payload", record.payload}};
      try {
        // Fan-out copies share a lineage id; later ones get a counter suffix.
        std::lock_guard lock(dead_letter_mu);
        auto path = dir / (record.lineage_id + ".json");
        for (int k = 1; fs::exists(path); ++k) path = dir / (record.lineage_id + "." + std::to_string(k) + ".json");
        write_text_file(path.string(), doc.dump(2) + "\n");
      } catch (const Error& e) {
        spdlog::error("dead-letter write failed: {}", e.what());
      }
    }
    ++dead;
    ++impl.dead_lettered;
    --impl.in_flight;
    impl.touch();
  }

  bool stopping() const override { return impl.stopping; }

  bool wait_stop_for(Steady::duration d) override {
    std::unique_lock lock(impl.stop_mu);
    return impl.stop_cv.wait_for(lock, d, [&] { return impl.stopping.load(); });
  }

  void work() {
    while (true) {
      auto record = input.pop_for(std::chrono::milliseconds(50));
      if (!record) {
        if (impl.shutdown) break;
        continue;
      }
      ++received;
      try {
        proc->process(*record, *this);
      } catch (const std::exception& e) {
        fail(std::move(*record), e.what());
      }
    }
  }

  PipelineRunner::Impl& impl;
  ProcessorConfig config;
  std::unique_ptr<Processor> proc;
  BoundedQueue<FlowRecord> input;
  std::map<std::string, std::vector<std::unique_ptr<Edge>>> out;
  std::thread thread;

  std::atomic<std::uint64_t> received{0};
  std::atomic<std::uint64_t> emitted{0};
  std::atomic<std::uint64_t> terminated{0};
  std::atomic<std::uint64_t> failures{0};
  std::atomic<std::uint64_t> dead{0};
  std::mutex dead_letter_mu;
};

}  // namespace

RunReport PipelineRunner::Impl::report() const {
  RunReport r;
  for (const auto& node : nodes) {
    r.processors[node->config.name] =
        ProcessorStats{node->received, node->emitted, node->terminated, node->failures, node->dead};
    for (const auto& [rel, edges] : node->out) {
      for (const auto& e : edges) r.connections[e->key] = e->count;
    }
  }
  r.sourced = sourced;
  r.forked = forked;
  r.completed = completed;
  r.dead_lettered = dead_lettered;
  const auto inflight = in_flight.load();
  r.in_flight = inflight < 0 ? 0 : static_cast<std::uint64_t>(inflight);
  return r;
}

PipelineRunner::PipelineRunner(PipelineConfig config, Services services) : impl_(std::make_unique<Impl>()) {
  config.check();
  impl_->config = std::move(config);
  impl_->services = std::move(services);
}

PipelineRunner::~PipelineRunner() {
  try {
    stop();
  } catch (const std::exception& e) {
    spdlog::error("pipeline stop failed: {}", e.what());
  }
}

void PipelineRunner::start() {
  auto& im = *impl_;
  if (im.started) throw Error(Errc::conflict, "pipeline already started");
  im.started = true;
  for (const auto& pc : im.config.processors) {
    auto node = std::make_unique<Node>(im, pc, make_processor(pc, im.config.base_dir), im.config.queue_capacity);
    im.by_name[pc.name] = node.get();
    im.nodes.push_back(std::move(node));
  }
  for (const auto& c : im.config.connections) {
    auto edge = std::make_unique<Edge>();
    edge->to = im.by_name.at(c.to);
    edge->key = c.from + "." + c.name + "->" + c.to;
    im.by_name.at(c.from)->out[c.name].push_back(std::move(edge));
  }
  im.touch();
  for (auto& node : im.nodes) node->proc->open(*node);
  for (auto& node : im.nodes) {
    if (!node->proc->is_source()) node->thread = std::thread([n = node.get()] { n->work(); });
  }
  for (auto& node : im.nodes) {
    if (!node->proc->is_source()) continue;
    ++im.sources_running;
    node->thread = std::thread([n = node.get(), &im] {
      try {
        n->proc->run(*n);
      } catch (const std::exception& e) {
        spdlog::error("source {} stopped: {}", n->config.name, e.what());
      }
      --im.sources_running;
      im.touch();
    });
  }
}

std::string PipelineRunner::endpoint(const std::string& processor) const {
  auto it = impl_->by_name.find(processor);
  if (it == impl_->by_name.end()) throw Error(Errc::not_found, "no processor '" + processor + "'");
  return it->second->proc->endpoint();
}

int PipelineRunner::tcp_port(const std::string& processor) const {
  auto it = impl_->by_name.find(processor);
  if (it == impl_->by_name.end()) throw Error(Errc::not_found, "no processor '" + processor + "'");
  return it->second->proc->tcp_port();
}

bool PipelineRunner::wait_idle(std::chrono::milliseconds quiet, std::chrono::milliseconds timeout) {
  auto& im = *impl_;
  const auto deadline = Steady::now() + timeout;
  while (true) {
    const auto now = Steady::now();
    const auto since = now - Steady::time_point(Steady::duration(im.last_activity.load()));
    if (im.in_flight.load() <= 0 && (im.sources_running == 0 || since >= quiet)) return true;
    if (now >= deadline) return false;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
}

RunReport PipelineRunner::snapshot() const { return impl_->report(); }

RunReport PipelineRunner::stop() {
  auto& im = *impl_;
  if (!im.started || im.stopped) return im.stopped ? im.final_report : im.report();
  im.stopped = true;
  {
    std::lock_guard lock(im.stop_mu);
    im.stopping = true;
  }
  im.stop_cv.notify_all();
  for (auto& node : im.nodes) {
    if (!node->proc->is_source()) continue;
    node->proc->close();
    if (node->thread.joinable()) node->thread.join();
  }
  const auto deadline = Steady::now() + std::chrono::seconds(30);
  while (im.in_flight.load() > 0 && Steady::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  im.shutdown = true;
  for (auto& node : im.nodes) node->input.close();
  for (auto& node : im.nodes) {
    if (node->thread.joinable()) node->thread.join();
    if (!node->proc->is_source()) node->proc->close();
  }
  im.final_report = im.report();
  return im.final_report;
}

RunReport run_pipeline(const PipelineConfig& config, Services services, const RunOptions& options) {
  PipelineRunner runner(config, std::move(services));
  runner.start();
  if (options.mode == StopMode::duration) {
    std::this_thread::sleep_for(options.duration);
  } else if (!runner.wait_idle(options.quiet, options.timeout)) {
    spdlog::warn("pipeline '{}' did not go idle within the timeout", config.name);
  }
  return runner.stop();
}

}  // namespace lodbridge::dataflow
