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

#include "lodbridge/historian/historian.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

#include <spdlog/spdlog.h>

#include "lodbridge/common/error.hpp"
#include "lodbridge/common/text.hpp"
#include "lodbridge/entity/representation.hpp"

namespace lodbridge::historian {

namespace fs = std::filesystem;

namespace {

std::string dedupe_key(const std::string& entity_id, const std::string& attr, Timestamp observed) {
  return entity_id + '\x1f' + attr + '\x1f' + std::to_string(to_unix_millis(observed));
}

std::string frame(const HistoryRecord& r) {
  const auto body = dump_compact(r.to_json());
  char header[16];
  std::snprintf(header, sizeof header, "%08zx ", body.size());
  return header + body + "\n";
}

}  // namespace

Json HistoryRecord::to_json() const {
  return Json{{"seq", seq},
              {"entityId", entity_id},
              {"entityType", entity_type},
              {"attrName", attr_name},
              {"value", value},
              {"observedAt", format_utc(observed_at)},
              {"receivedAt", format_utc(received_at)}};
}

HistoryRecord HistoryRecord::from_json(const Json& doc) {
  try {
    HistoryRecord r;
    r.seq = doc.at("seq").get<std::uint64_t>();
    r.entity_id = doc.at("entityId").get<std::string>();
    r.entity_type = doc.at("entityType").get<std::string>();
    r.attr_name = doc.at("attrName").get<std::string>();
    r.value = doc.at("value");
    r.observed_at = parse_timestamp(doc.at("observedAt").get<std::string>());
    r.received_at = parse_timestamp(doc.at("receivedAt").get<std::string>());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed, std::string("bad history record: ") + e.what());
  }
}

bool operator==(const HistoryRecord& a, const HistoryRecord& b) {
  return a.seq == b.seq && a.entity_id == b.entity_id && a.entity_type == b.entity_type &&
         a.attr_name == b.attr_name && canonical_dump(a.value) == canonical_dump(b.value) &&
         a.observed_at == b.observed_at && a.received_at == b.received_at;
}

std::string value_text(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  return canonical_dump(value);
}

std::string render(const std::vector<HistoryRecord>& rows, ExportFormat format) {
  std::string out;
  if (format == ExportFormat::csv) {
    out += std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
      out += std::to_string(r.seq) + "," + text::csv_field(r.entity_id) + "," + text::csv_field(r.entity_type) +
             "," + text::csv_field(r.attr_name) + "," + text::csv_field(value_text(r.value)) + "," +
             format_utc(r.observed_at) + "," + format_utc(r.received_at) + "\n";
    }
  } else {
    for (const auto& r : rows) out += dump_compact(r.to_json()) + "\n";
  }
  return out;
}

std::vector<HistoryRecord> read_jsonl(const std::string& path) {
  std::vector<HistoryRecord> out;
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(HistoryRecord::from_json(parse_json(line)));
  }
  return out;
}

Historian::Historian(fs::path dir, std::shared_ptr<Clock> clock, std::size_t segment_bytes)
    : dir_(std::move(dir)), clock_(std::move(clock)), segment_bytes_(segment_bytes) {
  fs::create_directories(dir_);
  load();
}

Historian::~Historian() = default;

fs::path Historian::segment_path(std::size_t n) const { return dir_ / ("segment-" + std::to_string(n) + ".log"); }

void Historian::load() {
  std::vector<std::size_t> segments;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("segment-", 0) == 0 && entry.path().extension() == ".log") {
      try {
        segments.push_back(std::stoul(name.substr(8)));
      } catch (const std::exception&) {
      }
    }
  }
  std::sort(segments.begin(), segments.end());
  for (auto n : segments) {
    const auto path = segment_path(n);
    const auto data = read_text_file(path.string());
    std::size_t pos = 0;
    while (pos < data.size()) {
      bool ok = pos + 9 <= data.size() && data[pos + 8] == ' ';
      std::size_t len = 0;
      if (ok) {
        try {
          std::size_t used = 0;
          len = std::stoul(data.substr(pos, 8), &used, 16);
          ok = used == 8;
        } catch (const std::exception&) {
          ok = false;
        }
      }
      ok = ok && pos + 9 + len + 1 <= data.size() && data[pos + 9 + len] == '\n';
      if (ok) {
        try {
          auto r = HistoryRecord::from_json(parse_json(std::string_view(data).substr(pos + 9, len)));
          keys_.insert(dedupe_key(r.entity_id, r.attr_name, r.observed_at));
          next_seq_ = std::max(next_seq_, r.seq + 1);
          records_.push_back(std::move(r));
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) {
        discarded_bytes_ += data.size() - pos;
        spdlog::warn("historian: discarding {} torn bytes at the end of {}", data.size() - pos, path.string());
        fs::resize_file(path, pos);
        break;
      }
      pos += 9 + len + 1;
    }
    segment_ = n;
    segment_size_ = fs::file_size(path);
  }
  out_.open(segment_path(segment_), std::ios::binary | std::ios::app);
  if (!out_) throw Error(Errc::io, "cannot open " + segment_path(segment_).string());
}

void Historian::append_locked(const HistoryRecord& r) {
  const auto bytes = frame(r);
  if (segment_size_ > 0 && segment_size_ + bytes.size() > segment_bytes_) {
    out_.close();
    ++segment_;
    segment_size_ = 0;
    out_.open(segment_path(segment_), std::ios::binary | std::ios::app);
  }
  out_.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out_.flush();
  if (!out_) throw Error(Errc::io, "append to " + segment_path(segment_).string() + " failed");
  segment_size_ += bytes.size();
}

std::vector<HistoryRecord> Historian::on_notification(const Json& body) {
  if (!body.is_object() || !body.contains("data") || !body["data"].is_array()) {
    throw Error(Errc::malformed, "notification needs a data array");
  }
  std::optional<Timestamp> notified_at;
  if (body.contains("notifiedAt")) {
    if (!body["notifiedAt"].is_string()) throw Error(Errc::malformed, "notifiedAt must be a string");
    notified_at = parse_iso8601(body["notifiedAt"].get<std::string>());
    if (!notified_at) throw Error(Errc::malformed, "notifiedAt is not a timestamp");
  }
  // Parse everything first so a bad entity rejects the whole notification.
  std::vector<entity::Entity> entities;
  for (const auto& doc : body["data"]) {
    try {
      entities.push_back(entity::from_document(doc));
    } catch (const Error& e) {
      throw Error(Errc::malformed, std::string("notification entity rejected: ") + e.what());
    }
  }
  const auto received = clock_->now();
  const auto fallback = notified_at.value_or(received);

  std::unique_lock lock(mu_);
  std::vector<HistoryRecord> appended;
  for (const auto& e : entities) {
    for (const auto& attr : e.attributes()) {
      const auto observed = attr.observed_at.value_or(fallback);
      const auto key = dedupe_key(e.id().str(), attr.name, observed);
      if (keys_.count(key)) continue;
      HistoryRecord r{next_seq_, e.id().str(), e.type(), attr.name, normalize_numbers(attr.value), observed,
                      received};
      append_locked(r);
      ++next_seq_;
      keys_.insert(key);
      records_.push_back(r);
      appended.push_back(std::move(r));
    }
  }
  return appended;
}

std::vector<HistoryRecord> Historian::query(const std::string& entity_id, const std::string& attr_name,
                                            Timestamp from, Timestamp to) const {
  if (to < from) throw Error(Errc::invalid_argument, "query range must satisfy from <= to");
  std::vector<HistoryRecord> out;
  {
    std::shared_lock lock(mu_);
    for (const auto& r : records_) {
      if (r.entity_id == entity_id && r.attr_name == attr_name && r.observed_at >= from && r.observed_at < to) {
        out.push_back(r);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.observed_at, a.seq) < std::tie(b.observed_at, b.seq);
  });
  return out;
}

std::vector<HistoryRecord> Historian::records(std::optional<Timestamp> from, std::optional<Timestamp> to) const {
  std::shared_lock lock(mu_);
  std::vector<HistoryRecord> out;
  for (const auto& r : records_) {
    if ((!from || r.observed_at >= *from) && (!to || r.observed_at < *to)) out.push_back(r);
  }
  return out;
}

std::size_t Historian::export_to(const std::string& path, ExportFormat format, std::optional<Timestamp> from,
                                 std::optional<Timestamp> to) const {
  const auto rows = records(from, to);
  write_text_file(path, render(rows, format));
  return rows.size();
}

std::size_t Historian::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

}  // namespace lodbridge::historian
