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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

namespace lodbridge {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// Accepts `YYYY-MM-DDThh:mm:ss[.f+][Z|(+|-)hh:mm]`. A missing zone is read
/// as UTC.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Throws Error(invalid_argument) on malformed input.
Timestamp parse_timestamp(std::string_view text);

/// UTC with exactly two fractional-second digits: `2021-11-10T15:00:00.00Z`.
std::string format_utc(Timestamp t);

/// Parses `text` with a strftime-style pattern (%Y %m %d %H %M %S and
/// literals). The result is read as UTC.
std::optional<Timestamp> parse_with_format(std::string_view text, std::string_view format);

/// Monday 00:00 UTC is hour 0; Sunday 23:00 is hour 167.
int hour_of_week(Timestamp t);

Timestamp from_unix_millis(std::int64_t millis);
std::int64_t to_unix_millis(Timestamp t);

/// Wall-clock source. Everything that stamps data takes one of these so
/// tests and the scenario can pin time.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Timestamp now() const = 0;
};

class SystemClock final : public Clock {
 public:
  Timestamp now() const override;
};

/// Manually driven clock. With a non-zero step, every read advances time,
/// which gives a strictly monotone sequence.
class ManualClock final : public Clock {
 public:
  explicit ManualClock(Timestamp start, std::chrono::milliseconds step = std::chrono::milliseconds{0});

  Timestamp now() const override;
  void set(Timestamp t);
  void advance(std::chrono::milliseconds delta);

 private:
  mutable std::mutex mu_;
  mutable Timestamp current_;
  std::chrono::milliseconds step_;
};

std::shared_ptr<Clock> system_clock();

}  // namespace lodbridge
