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

#include "lodbridge/common/time.hpp"

#include <cctype>
#include <cstdio>

#include "lodbridge/common/error.hpp"

namespace lodbridge {

using namespace std::chrono;

namespace {

bool read_digits(std::string_view text, std::size_t& pos, std::size_t count, int& out) {
  if (pos + count > text.size()) return false;
  int value = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const char c = text[pos + i];
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    value = value * 10 + (c - '0');
  }
  pos += count;
  out = value;
  return true;
}

bool expect(std::string_view text, std::size_t& pos, char c) {
  if (pos >= text.size() || text[pos] != c) return false;
  ++pos;
  return true;
}

std::optional<Timestamp> make_time(int y, int mo, int d, int h, int mi, int s, int millis) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  return time_point_cast<milliseconds>(sys_days{ymd}) + hours{h} + minutes{mi} + seconds{s} +
         milliseconds{millis};
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  std::size_t pos = 0;
  int y, mo, d, h, mi, s;
  if (!read_digits(text, pos, 4, y) || !expect(text, pos, '-') || !read_digits(text, pos, 2, mo) ||
      !expect(text, pos, '-') || !read_digits(text, pos, 2, d)) {
    return std::nullopt;
  }
  if (pos >= text.size() || (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ')) {
    return std::nullopt;
  }
  ++pos;
  if (!read_digits(text, pos, 2, h) || !expect(text, pos, ':') || !read_digits(text, pos, 2, mi) ||
      !expect(text, pos, ':') || !read_digits(text, pos, 2, s)) {
    return std::nullopt;
  }
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    std::size_t digits = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  int offset_minutes = 0;
  if (pos < text.size()) {
    if (text[pos] == 'Z' || text[pos] == 'z') {
      ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
      const int sign = text[pos] == '-' ? -1 : 1;
      ++pos;
      int oh, om;
      if (!read_digits(text, pos, 2, oh)) return std::nullopt;
      expect(text, pos, ':');
      if (!read_digits(text, pos, 2, om)) return std::nullopt;
      offset_minutes = sign * (oh * 60 + om);
    }
  }
  if (pos != text.size()) return std::nullopt;
  auto t = make_time(y, mo, d, h, mi, s, millis);
  if (!t) return std::nullopt;
  return *t - minutes{offset_minutes};
}

Timestamp parse_timestamp(std::string_view text) {
  auto t = parse_iso8601(text);
  if (!t) throw Error(Errc::invalid_argument, "invalid ISO-8601 timestamp: " + std::string(text));
  return *t;
}

std::string format_utc(Timestamp t) {
  const auto day_point = floor<days>(t);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{t - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()),
                static_cast<int>(tod.subseconds().count() / 10));
  return buf;
}

std::optional<Timestamp> parse_with_format(std::string_view text, std::string_view format) {
  int y = 1970, mo = 1, d = 1, h = 0, mi = 0, s = 0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] == '%' && i + 1 < format.size()) {
      const char spec = format[++i];
      bool ok = false;
      switch (spec) {
        case 'Y': ok = read_digits(text, pos, 4, y); break;
        case 'm': ok = read_digits(text, pos, 2, mo); break;
        case 'd': ok = read_digits(text, pos, 2, d); break;
        case 'H': ok = read_digits(text, pos, 2, h); break;
        case 'M': ok = read_digits(text, pos, 2, mi); break;
        case 'S': ok = read_digits(text, pos, 2, s); break;
        case '%': ok = expect(text, pos, '%'); break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else if (!expect(text, pos, format[i])) {
      return std::nullopt;
    }
  }
  if (pos != text.size()) return std::nullopt;
  return make_time(y, mo, d, h, mi, s, 0);
}

int hour_of_week(Timestamp t) {
  const auto day_point = floor<days>(t);
  const weekday wd{day_point};
  const auto hour = floor<hours>(t - day_point).count();
  return static_cast<int>(wd.iso_encoding() - 1) * 24 + static_cast<int>(hour);
}

Timestamp from_unix_millis(std::int64_t millis) { return Timestamp{milliseconds{millis}}; }

std::int64_t to_unix_millis(Timestamp t) { return t.time_since_epoch().count(); }

Timestamp SystemClock::now() const {
  return time_point_cast<milliseconds>(system_clock::now());
}

ManualClock::ManualClock(Timestamp start, milliseconds step) : current_(start), step_(step) {}

Timestamp ManualClock::now() const {
  std::lock_guard lock(mu_);
  const auto t = current_;
  current_ += step_;
  return t;
}

void ManualClock::set(Timestamp t) {
  std::lock_guard lock(mu_);
  current_ = t;
}

void ManualClock::advance(milliseconds delta) {
  std::lock_guard lock(mu_);
  current_ += delta;
}

std::shared_ptr<Clock> system_clock() {
  static auto clock = std::make_shared<SystemClock>();
  return clock;
}

}  // namespace lodbridge
