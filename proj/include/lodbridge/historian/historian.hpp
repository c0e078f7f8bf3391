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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "lodbridge/common/json.hpp"
#include "lodbridge/common/time.hpp"

namespace lodbridge::historian {

struct HistoryRecord {
  std::uint64_t seq = 0;
  std::string entity_id;
  std::string entity_type;
  std::string attr_name;
  Json value;
  Timestamp observed_at{};
  Timestamp received_at{};

  Json to_json() const;
  static HistoryRecord from_json(const Json& doc);

  friend bool operator==(const HistoryRecord& a, const HistoryRecord& b);
};

enum class ExportFormat { csv, jsonl };

inline constexpr const char* kCsvHeader = "seq,entityId,entityType,attrName,value,observedAt,receivedAt";

/// CSV cell for a value: strings as-is, everything else as canonical JSON.
std::string value_text(const Json& value);

/// Export body: CSV with header, or one JSON object per line.
std::string render(const std::vector<HistoryRecord>& rows, ExportFormat format);

/// Reads a jsonl export back.
std::vector<HistoryRecord> read_jsonl(const std::string& path);

/// Append-only, segmented attribute history. Each record is stored as
/// `<8 hex digits length> <json>\n` in `<dir>/segment-<n>.log`; a torn
/// trailing record is cut off when the log is opened.
class Historian {
 public:
  explicit Historian(std::filesystem::path dir, std::shared_ptr<Clock> clock = system_clock(),
                     std::size_t segment_bytes = 1 << 20);
  ~Historian();
  Historian(const Historian&) = delete;
  Historian& operator=(const Historian&) = delete;

  /// Takes a notification body `{subscriptionId, notifiedAt, data:[...]}`
  /// and appends one record per attribute per entity, skipping records
  /// whose (entityId, attrName, observedAt) is already stored. Throws
  /// Error(malformed) and appends nothing when the body is invalid.
  std::vector<HistoryRecord> on_notification(const Json& body);

  /// Records with observedAt in [from, to), ordered by (observedAt, seq).
  /// Throws Error(invalid_argument) unless from <= to.
  std::vector<HistoryRecord> query(const std::string& entity_id, const std::string& attr_name, Timestamp from,
                                   Timestamp to) const;

  /// All records in append order, optionally limited to observedAt in
  /// [from, to).
  std::vector<HistoryRecord> records(std::optional<Timestamp> from = std::nullopt,
                                     std::optional<Timestamp> to = std::nullopt) const;

  /// Returns the number of records written.
  std::size_t export_to(const std::string& path, ExportFormat format, std::optional<Timestamp> from = std::nullopt,
                        std::optional<Timestamp> to = std::nullopt) const;

  std::size_t size() const;
  /// Bytes cut from torn tails while opening.
  std::size_t discarded_bytes() const { return discarded_bytes_; }

 private:
  void load();
  void append_locked(const HistoryRecord& r);
  std::filesystem::path segment_path(std::size_t n) const;

  std::filesystem::path dir_;
  std::shared_ptr<Clock> clock_;
  std::size_t segment_bytes_;
  mutable std::shared_mutex mu_;
  std::vector<HistoryRecord> records_;
  std::set<std::string> keys_;
  std::uint64_t next_seq_ = 1;
  std::size_t segment_ = 0;
  std::size_t segment_size_ = 0;
  std::ofstream out_;
  std::size_t discarded_bytes_ = 0;
};

}  // namespace lodbridge::historian
