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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"
#include "lodbridge/dataflow/record.hpp"

namespace lodbridge::broker {
class BrokerApi;
}
namespace lodbridge::catalog {
class CatalogApi;
}
namespace lodbridge::historian {
class Historian;
}
namespace lodbridge::entity {
class TemplateRegistry;
}

namespace lodbridge::dataflow {

inline constexpr std::size_t kDefaultQueueCapacity = 1000;

struct ProcessorConfig {
  std::string name;
  std::string kind;
  Json params = Json::object();
};

struct Connection {
  std::string from;
  std::string name = "success";
  std::string to;
};

struct PipelineConfig {
  std::string name = "pipeline";
  std::vector<ProcessorConfig> processors;
  std::vector<Connection> connections;
  std::size_t queue_capacity = kDefaultQueueCapacity;
  std::optional<std::filesystem::path> dead_letter_dir;
  /// Relative file params (spec, registry) resolve against this.
  std::filesystem::path base_dir = ".";

  const ProcessorConfig* find(const std::string& name) const;

  /// Throws Error(validation): duplicate or unknown names, unknown kinds,
  /// missing kind params, edges into sources, cycles.
  void check() const;

  /// `${var}` inside string values is replaced from `vars` first.
  static PipelineConfig from_json(const Json& doc, const std::map<std::string, std::string>& vars = {});
  /// YAML or JSON, picked by extension.
  static PipelineConfig load(const std::filesystem::path& path,
                             const std::map<std::string, std::string>& vars = {});
};

Json yaml_to_json(const std::string& yaml_text);

/// Shared collaborators handed to processors.
struct Services {
  std::shared_ptr<Clock> clock = system_clock();
  broker::BrokerApi* broker = nullptr;
  catalog::CatalogApi* catalog = nullptr;
  historian::Historian* historian = nullptr;
  const entity::TemplateRegistry* templates = nullptr;
};

class ProcessorContext {
 public:
  virtual ~ProcessorContext() = default;
  virtual const std::string& name() const = 0;
  virtual const Services& services() const = 0;
  virtual const std::filesystem::path& base_dir() const = 0;

  /// Sources: mints a record with a fresh lineage id and counts it as
  /// sourced. The caller must then emit or fail it.
  virtual FlowRecord make_record(std::string payload, std::map<std::string, std::string> attributes) = 0;
  /// Hands the record to every connection named `relationship`. With none,
  /// the record terminates here.
  virtual void emit(FlowRecord record, const std::string& relationship = "success") = 0;
  /// Routes to the `failure` connection, or the dead-letter directory.
  virtual void fail(FlowRecord record, const std::string& reason) = 0;

  virtual bool stopping() const = 0;
  /// Sleeps until stop is requested or `d` elapses; true means stopping.
  virtual bool wait_stop_for(std::chrono::steady_clock::duration d) = 0;
};

class Processor {
 public:
  virtual ~Processor() = default;
  virtual bool is_source() const { return false; }
  /// Runs before any worker thread. Listeners bind here.
  virtual void open(ProcessorContext&) {}
  /// Sources only. Returns when done or when stopping.
  virtual void run(ProcessorContext&) {}
  virtual void process(const FlowRecord&, ProcessorContext&) {}
  virtual void close() {}
  /// Listening base URL for http-listen and device-gateway.
  virtual std::string endpoint() const { return {}; }
  virtual int tcp_port() const { return 0; }
};

bool is_source_kind(const std::string& kind);
bool is_known_kind(const std::string& kind);

/// Throws Error(validation) when kind params are missing or bad.
std::unique_ptr<Processor> make_processor(const ProcessorConfig& config, const std::filesystem::path& base_dir);

struct ProcessorStats {
  std::uint64_t received = 0;
  std::uint64_t emitted = 0;
  std::uint64_t terminated = 0;
  std::uint64_t failures = 0;
  std::uint64_t dead_lettered = 0;
};

struct RunReport {
  std::map<std::string, std::uint64_t> connections;  // "from.name->to"
  std::map<std::string, ProcessorStats> processors;
  std::uint64_t sourced = 0;
  std::uint64_t forked = 0;  // extra copies from fan-out
  std::uint64_t completed = 0;
  std::uint64_t dead_lettered = 0;
  std::uint64_t in_flight = 0;

  /// sourced + forked == completed + dead_lettered, nothing in flight.
  bool conserved() const { return in_flight == 0 && sourced + forked == completed + dead_lettered; }
  Json to_json() const;
};

enum class StopMode { until_idle, duration };

struct RunOptions {
  StopMode mode = StopMode::until_idle;
  std::chrono::milliseconds duration{0};
  /// Idle also needs this long without record activity unless every
  /// source has finished.
  std::chrono::milliseconds quiet{300};
  std::chrono::milliseconds timeout{std::chrono::minutes(5)};
};

class PipelineRunner {
 public:
  PipelineRunner(PipelineConfig config, Services services);
  ~PipelineRunner();
  PipelineRunner(const PipelineRunner&) = delete;
  PipelineRunner& operator=(const PipelineRunner&) = delete;

  void start();
  std::string endpoint(const std::string& processor) const;
  int tcp_port(const std::string& processor) const;
  /// False on timeout.
  bool wait_idle(std::chrono::milliseconds quiet, std::chrono::milliseconds timeout);
  /// Stops sources, drains, joins workers. Safe to call twice.
  RunReport stop();
  RunReport snapshot() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

/// Validates, runs until the stop condition, returns the report.
RunReport run_pipeline(const PipelineConfig& config, Services services, const RunOptions& options = {});

}  // namespace lodbridge::dataflow
