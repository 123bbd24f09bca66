/*
 * Copyright 2026 The AeroLens Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef AEROLENS_TYPES_HPP_
#define AEROLENS_TYPES_HPP_

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"

namespace aerolens {

// Fixed feature order used by every vector or matrix view.
enum class Pollutant : std::uint8_t { kNo2 = 0, kVoc, kPm10, kPm2_5, kPm1 };

inline constexpr std::size_t kPollutantCount = 5;
inline constexpr std::array<Pollutant, kPollutantCount> kAllPollutants = {
    Pollutant::kNo2, Pollutant::kVoc, Pollutant::kPm10, Pollutant::kPm2_5, Pollutant::kPm1};

inline constexpr std::size_t Index(Pollutant p) { return static_cast<std::size_t>(p); }

// Short key used in JSON documents and configs.
inline std::string_view PollutantKey(Pollutant p) {
  static constexpr std::array<std::string_view, kPollutantCount> kKeys = {"no2", "voc", "pm10",
                                                                          "pm2_5", "pm1"};
  return kKeys[Index(p)];
}

inline std::optional<Pollutant> ParsePollutant(std::string_view key) {
  for (Pollutant p : kAllPollutants) {
    if (PollutantKey(p) == key) return p;
  }
  if (key == "pm25" || key == "pm2.5") return Pollutant::kPm2_5;
  return std::nullopt;
}

// One sample over the five pollutants. NO2 and VOC in ppb, particulate
// matter in ug/m3. A NaN component marks a missing reading; it only exists
// between ingestion and preprocessing.
struct PollutantVector {
  std::array<double, kPollutantCount> values{};

  double& operator[](Pollutant p) { return values[Index(p)]; }
  double operator[](Pollutant p) const { return values[Index(p)]; }

  bool HasNull() const {
    for (double v : values) {
      if (std::isnan(v)) return true;
    }
    return false;
  }
  bool HasNegative() const {
    for (double v : values) {
      if (v < 0.0) return true;
    }
    return false;
  }

  friend bool operator==(const PollutantVector&, const PollutantVector&) = default;
};

inline constexpr double kNullValue = std::numeric_limits<double>::quiet_NaN();

enum class ActivityLabel : std::uint8_t {
  kCooking = 0,
  kSmoking,
  kAirConditioning,
  kIncenseStick,
  kPaperBurning,
  kUnknown,
};

inline constexpr std::array<ActivityLabel, 5> kSourceActivities = {
    ActivityLabel::kCooking, ActivityLabel::kSmoking, ActivityLabel::kAirConditioning,
    ActivityLabel::kIncenseStick, ActivityLabel::kPaperBurning};

inline std::string_view ActivityName(ActivityLabel a) {
  switch (a) {
    case ActivityLabel::kCooking:
      return "Cooking";
    case ActivityLabel::kSmoking:
      return "Smoking";
    case ActivityLabel::kAirConditioning:
      return "AirConditioning";
    case ActivityLabel::kIncenseStick:
      return "IncenseStick";
    case ActivityLabel::kPaperBurning:
      return "PaperBurning";
    case ActivityLabel::kUnknown:
      return "Unknown";
  }
  return "Unknown";
}

inline std::optional<ActivityLabel> ParseActivity(std::string_view name) {
  for (auto a :
       {ActivityLabel::kCooking, ActivityLabel::kSmoking, ActivityLabel::kAirConditioning,
        ActivityLabel::kIncenseStick, ActivityLabel::kPaperBurning, ActivityLabel::kUnknown}) {
    if (ActivityName(a) == name) return a;
  }
  return std::nullopt;
}

// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

namespace detail {

inline bool ParseDigits(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

// Accepts "YYYY-MM-DDTHH:MM:SSZ" (a trailing "+00:00" is also accepted).
inline std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s;
  if (text.size() < 20) return std::nullopt;
  if (!detail::ParseDigits(text, 0, 4, y) || text[4] != '-' ||
      !detail::ParseDigits(text, 5, 2, mo) || text[7] != '-' ||
      !detail::ParseDigits(text, 8, 2, d) || (text[10] != 'T' && text[10] != ' ') ||
      !detail::ParseDigits(text, 11, 2, h) || text[13] != ':' ||
      !detail::ParseDigits(text, 14, 2, mi) || text[16] != ':' ||
      !detail::ParseDigits(text, 17, 2, s)) {
    return std::nullopt;
  }
  const std::string_view zone = text.substr(19);
  if (zone != "Z" && zone != "+00:00") return std::nullopt;
  if (h > 23 || mi > 59 || s > 59) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  const auto days = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + h * 3600 + mi * 60 + s;
}

inline std::string FormatTimestamp(Timestamp t) {
  using namespace std::chrono;
  std::int64_t days = t / 86400;
  if (t % 86400 < 0) --days;
  const std::int64_t secs = t - days * 86400;
  const year_month_day ymd{sys_days{std::chrono::days{days}}};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(secs / 3600), static_cast<int>((secs / 60) % 60),
                static_cast<int>(secs % 60));
  return buf;
}

// "YYYY-MM-DD" of the UTC day containing `t`.
inline std::string FormatDate(Timestamp t) { return FormatTimestamp(t).substr(0, 10); }

// Midnight UTC of a "YYYY-MM-DD" date.
inline std::optional<Timestamp> ParseDate(std::string_view date) {
  if (date.size() != 10) return std::nullopt;
  std::string full(date);
  full += "T00:00:00Z";
  return ParseTimestamp(full);
}

struct Reading {
  Timestamp timestamp = 0;
  PollutantVector pollutants;
  std::optional<ActivityLabel> activity;
  std::optional<std::string> person_id;

  friend bool operator==(const Reading& a, const Reading& b) {
    // NaN-aware so datasets carrying nulls still compare equal to themselves.
    for (std::size_t i = 0; i < kPollutantCount; ++i) {
      const double x = a.pollutants.values[i];
      const double y = b.pollutants.values[i];
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) return false;
    }
    return a.timestamp == b.timestamp && a.activity == b.activity && a.person_id == b.person_id;
  }
};

// Readings ordered non-decreasing by timestamp.
struct Dataset {
  std::vector<Reading> readings;
  std::string source_tag;

  std::size_t size() const { return readings.size(); }
  bool empty() const { return readings.empty(); }

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// One labelled span [start, end) of a day.
struct TimelineSegment {
  Timestamp start = 0;
  Timestamp end = 0;
  ActivityLabel label = ActivityLabel::kUnknown;
  double confidence = 1.0;

  friend bool operator==(const TimelineSegment&, const TimelineSegment&) = default;
};

struct ActivityTimeline {
  std::vector<TimelineSegment> segments;

  friend bool operator==(const ActivityTimeline&, const ActivityTimeline&) = default;
};

// Raw concentrations as an n x 5 matrix in pollutant order.
inline Matrix ToMatrix(const Dataset& dataset) {
  Matrix m(dataset.size(), kPollutantCount);
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const auto& v = dataset.readings[r].pollutants.values;
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

}  // namespace aerolens

#endif  // AEROLENS_TYPES_HPP_
