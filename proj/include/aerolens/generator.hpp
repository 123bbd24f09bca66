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

#ifndef AEROLENS_GENERATOR_HPP_
#define AEROLENS_GENERATOR_HPP_

// Synthetic activity traces standing in for collected sensor data.
//
// The default profiles are reconstructions, not measurements. They honour
// the qualitative shape of the reported box plots: cooking has the highest
// and widest VOC, air conditioning a high but tight VOC, paper burning a
// narrow VOC band with PM10 below 50, incense the heaviest PM10 with many
// samples above 200, and smoking a VOC range of roughly 200 with high fine
// particulates.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/random.hpp"
#include "aerolens/types.hpp"

namespace aerolens {

struct PollutantDistribution {
  double mean = 0.0;
  double std_dev = 0.0;
  double floor = 0.0;
  double ceiling = 1.0;
};

struct ActivityProfile {
  std::array<PollutantDistribution, kPollutantCount> pollutants{};

  const PollutantDistribution& operator[](Pollutant p) const { return pollutants[Index(p)]; }
  PollutantDistribution& operator[](Pollutant p) { return pollutants[Index(p)]; }
};

inline void ValidateProfile(const ActivityProfile& profile) {
  for (Pollutant p : kAllPollutants) {
    const auto& d = profile[p];
    if (!(d.std_dev >= 0.0) || !(d.floor >= 0.0) || !(d.ceiling > d.floor) ||
        !std::isfinite(d.mean) || !std::isfinite(d.ceiling)) {
      throw Error(Errc::kBadProfile, "invalid distribution for " + std::string(PollutantKey(p)));
    }
  }
}

namespace detail {

inline ActivityProfile MakeProfile(std::array<PollutantDistribution, kPollutantCount> d) {
  ActivityProfile profile;
  profile.pollutants = d;
  return profile;
}

}  // namespace detail

// Order of each row: no2, voc, pm10, pm2.5, pm1 as {mean, std_dev, floor, ceiling}.
inline ActivityProfile DefaultProfile(ActivityLabel activity) {
  switch (activity) {
    case ActivityLabel::kCooking:
      return detail::MakeProfile({{{60, 12, 10, 150},
                                   {320, 60, 170, 470},
                                   {90, 45, 10, 400},
                                   {40, 12, 5, 120},
                                   {25, 8, 2, 80}}});
    case ActivityLabel::kSmoking:
      return detail::MakeProfile({{{35, 5, 15, 60},
                                   {200, 40, 100, 300},
                                   {70, 18, 15, 150},
                                   {150, 30, 50, 280},
                                   {110, 22, 30, 200}}});
    case ActivityLabel::kAirConditioning:
      return detail::MakeProfile({{{10, 3, 1, 25},
                                   {300, 8, 275, 325},
                                   {60, 30, 5, 195},
                                   {15, 5, 1, 50},
                                   {8, 3, 0.5, 25}}});
    case ActivityLabel::kIncenseStick:
      return detail::MakeProfile({{{14, 3, 2, 30},
                                   {250, 60, 100, 400},
                                   {180, 60, 20, 350},
                                   {110, 28, 20, 250},
                                   {70, 18, 10, 180}}});
    case ActivityLabel::kPaperBurning:
      return detail::MakeProfile(
          {{{22, 4, 8, 40}, {150, 12, 125, 175}, {25, 8, 5, 48}, {18, 5, 2, 45}, {12, 4, 1, 35}}});
    case ActivityLabel::kUnknown:
      break;
  }
  throw Error(Errc::kBadProfile, "no default profile for activity Unknown");
}

// Low-level background air used to fill the gaps between scheduled activities.
inline ActivityProfile BaselineProfile() {
  return detail::MakeProfile(
      {{{6, 2, 0, 15}, {60, 10, 20, 100}, {12, 4, 0, 30}, {6, 2, 0, 15}, {4, 1.5, 0, 10}}});
}

namespace detail {

// Gaussian truncated to [floor, ceiling] by rejection; clamps the mean if the
// acceptance region is practically unreachable.
inline double SampleTruncated(Rng& rng, const PollutantDistribution& d) {
  if (d.std_dev == 0.0) return std::clamp(d.mean, d.floor, d.ceiling);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double v = rng.Normal(d.mean, d.std_dev);
    if (v >= d.floor && v <= d.ceiling) return v;
  }
  return std::clamp(d.mean, d.floor, d.ceiling);
}

inline Reading SampleReading(Rng& rng, const ActivityProfile& profile, Timestamp t) {
  Reading r;
  r.timestamp = t;
  for (Pollutant p : kAllPollutants) r.pollutants[p] = SampleTruncated(rng, profile[p]);
  return r;
}

}  // namespace detail

struct TraceOptions {
  Timestamp start = 0;
  std::optional<std::string> person_id;
};

// One reading per sampling period over `duration_minutes`, labelled with
// `activity`.
inline Dataset GenerateActivityTrace(ActivityLabel activity, double duration_minutes,
                                     int sampling_period_s, const ActivityProfile& profile,
                                     std::uint64_t seed, const TraceOptions& options = {}) {
  if (!(duration_minutes > 0.0) || sampling_period_s <= 0) {
    throw Error(Errc::kInvalidArgument, "duration and sampling period must be positive");
  }
  ValidateProfile(profile);
  Rng rng(DeriveSeed(seed, "generator/trace"));
  const auto count =
      static_cast<std::size_t>(duration_minutes * 60.0 / static_cast<double>(sampling_period_s));
  Dataset out;
  out.source_tag = "synthetic:" + std::string(ActivityName(activity));
  out.readings.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    auto r = detail::SampleReading(rng, profile,
                                   options.start + static_cast<Timestamp>(i) * sampling_period_s);
    r.activity = activity;
    r.person_id = options.person_id;
    out.readings.push_back(std::move(r));
  }
  return out;
}

inline Dataset GenerateActivityTrace(ActivityLabel activity, double duration_minutes,
                                     int sampling_period_s, std::uint64_t seed,
                                     const TraceOptions& options = {}) {
  return GenerateActivityTrace(activity, duration_minutes, sampling_period_s,
                               DefaultProfile(activity), seed, options);
}

struct ScheduleSegment {
  int start_minute = 0;  // minutes after midnight
  int duration_minutes = 0;
  ActivityLabel activity = ActivityLabel::kUnknown;
};

struct DayOptions {
  Timestamp day_start = 0;  // midnight UTC of the simulated day
  int sampling_period_s = 60;
  std::optional<std::string> person_id;
};

// 24 hours of readings. Scheduled blocks are drawn from their activity's
// default profile and labelled; everything else is unlabelled baseline air.
// The returned timeline lists the scheduled blocks in time order.
inline std::pair<Dataset, ActivityTimeline> GenerateDaySchedule(
    std::vector<ScheduleSegment> schedule, std::uint64_t seed, const DayOptions& options = {}) {
  constexpr int kDayMinutes = 24 * 60;
  if (options.sampling_period_s <= 0) {
    throw Error(Errc::kInvalidArgument, "sampling period must be positive");
  }
  for (const auto& s : schedule) {
    if (s.start_minute < 0 || s.duration_minutes <= 0 ||
        s.start_minute + s.duration_minutes > kDayMinutes) {
      throw Error(Errc::kInvalidArgument, "schedule segment outside the 24 h window");
    }
    if (s.activity == ActivityLabel::kUnknown) {
      throw Error(Errc::kInvalidArgument, "schedule segment needs a source activity");
    }
  }
  std::stable_sort(schedule.begin(), schedule.end(),
                   [](const auto& a, const auto& b) { return a.start_minute < b.start_minute; });
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i].start_minute <
        schedule[i - 1].start_minute + schedule[i - 1].duration_minutes) {
      throw Error(Errc::kOverlappingSegments, "schedule segments overlap");
    }
  }

  std::vector<ActivityProfile> profiles;
  std::vector<Rng> segment_rngs;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    profiles.push_back(DefaultProfile(schedule[i].activity));
    segment_rngs.emplace_back(DeriveSeed(seed, "generator/day/segment", i));
  }
  const ActivityProfile baseline = BaselineProfile();
  Rng baseline_rng(DeriveSeed(seed, "generator/day/baseline"));

  Dataset data;
  data.source_tag = "synthetic:day";
  const int count = kDayMinutes * 60 / options.sampling_period_s;
  data.readings.reserve(static_cast<std::size_t>(count));
  std::size_t seg = 0;
  for (int i = 0; i < count; ++i) {
    const int offset_s = i * options.sampling_period_s;
    while (seg < schedule.size() &&
           offset_s >= (schedule[seg].start_minute + schedule[seg].duration_minutes) * 60) {
      ++seg;
    }
    const Timestamp t = options.day_start + offset_s;
    Reading r;
    if (seg < schedule.size() && offset_s >= schedule[seg].start_minute * 60) {
      r = detail::SampleReading(segment_rngs[seg], profiles[seg], t);
      r.activity = schedule[seg].activity;
    } else {
      r = detail::SampleReading(baseline_rng, baseline, t);
    }
    r.person_id = options.person_id;
    data.readings.push_back(std::move(r));
  }

  ActivityTimeline truth;
  for (const auto& s : schedule) {
    truth.segments.push_back({options.day_start + s.start_minute * 60,
                              options.day_start + (s.start_minute + s.duration_minutes) * 60,
                              s.activity, 1.0});
  }
  return {std::move(data), std::move(truth)};
}

}  // namespace aerolens

#endif  // AEROLENS_GENERATOR_HPP_
