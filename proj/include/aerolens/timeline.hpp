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

#ifndef AEROLENS_TIMELINE_HPP_
#define AEROLENS_TIMELINE_HPP_

// Sliding-window activity segmentation of a day of readings.
//
// Windows of `window_minutes` advance by `step_minutes`. Each window's mean
// pollutant vector is classified, labels are majority-smoothed over
// `votes` consecutive windows, and runs of equal labels are merged into
// segments. Window i owns the time between the midpoints of its neighbours'
// centres, so the segments tile the input span exactly.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/error.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/types.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kTimelineSchemaVersion = 1;

struct SegmentOptions {
  int window_minutes = 15;
  int step_minutes = 5;
  int votes = 3;
};

struct WindowPrediction {
  Timestamp start = 0;
  Timestamp end = 0;
  std::size_t raw_label = 0;  // index into the model's class list
  std::size_t smoothed_label = 0;
  std::vector<double> proba;

  Timestamp Center() const { return start + (end - start) / 2; }
};

struct Segmentation {
  std::vector<WindowPrediction> windows;
  ActivityTimeline timeline;
};

// Typical gap between consecutive readings; 60 s for a single reading.
inline Timestamp SamplingPeriod(const Dataset& data) {
  std::vector<Timestamp> gaps;
  for (std::size_t i = 1; i < data.size(); ++i) {
    const Timestamp g = data.readings[i].timestamp - data.readings[i - 1].timestamp;
    if (g > 0) gaps.push_back(g);
  }
  if (gaps.empty()) return 60;
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

inline std::vector<ActivityLabel> ActivityClasses(const ClassifierModel& model) {
  std::vector<ActivityLabel> out;
  for (const auto& name : model.class_list) {
    const auto a = ParseActivity(name);
    if (!a || *a == ActivityLabel::kUnknown) {
      throw Error(Errc::kInvalidArgument,
                  "model class '" + name + "' is not an activity; train with target=activity");
    }
    out.push_back(*a);
  }
  return out;
}

// Majority label over a centred run of `votes` windows. A tie keeps the
// window's own label when it is among the leaders, else the earliest class.
inline std::vector<std::size_t> SmoothLabels(const std::vector<std::size_t>& labels, int votes) {
  if (votes <= 1) return labels;
  const auto half = static_cast<std::ptrdiff_t>(votes / 2);
  const auto n = static_cast<std::ptrdiff_t>(labels.size());
  std::vector<std::size_t> out(labels.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    std::map<std::size_t, int> tally;
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - half); j <= std::min(n - 1, i + half);
         ++j) {
      ++tally[labels[static_cast<std::size_t>(j)]];
    }
    int top = 0;
    for (const auto& [label, count] : tally) top = std::max(top, count);
    const std::size_t own = labels[static_cast<std::size_t>(i)];
    if (tally[own] == top) {
      out[static_cast<std::size_t>(i)] = own;
    } else {
      for (const auto& [label, count] : tally) {
        if (count == top) {
          out[static_cast<std::size_t>(i)] = label;
          break;
        }
      }
    }
  }
  return out;
}

inline Segmentation SegmentActivities(const ClassifierModel& model, const Dataset& day,
                                      const SegmentOptions& options = {}) {
  if (options.window_minutes <= 0 || options.step_minutes <= 0 || options.votes <= 0) {
    throw Error(Errc::kInvalidArgument, "window, step and votes must be positive");
  }
  const auto classes = ActivityClasses(model);
  if (day.empty()) throw Error(Errc::kEmptyDataset, "no readings to segment");
  const Timestamp period = SamplingPeriod(day);
  const Timestamp span_start = day.readings.front().timestamp;
  const Timestamp span_end = day.readings.back().timestamp + period;
  if (span_end - span_start > 24 * 3600 + period) {
    throw Error(Errc::kInvalidArgument, "segmentation input spans more than 24 h");
  }
  const Timestamp window = options.window_minutes * 60;
  const Timestamp step = options.step_minutes * 60;
  if (span_end - span_start < window) {
    throw Error(Errc::kWindowLargerThanData, "window is longer than the data span");
  }

  Segmentation result;
  std::size_t lo = 0;
  std::optional<std::size_t> last_filled;
  std::vector<std::size_t> pending_empty;
  for (Timestamp ws = span_start; ws + window <= span_end; ws += step) {
    while (lo < day.size() && day.readings[lo].timestamp < ws) ++lo;
    std::vector<double> mean(kPollutantCount, 0.0);
    std::size_t count = 0;
    for (std::size_t i = lo; i < day.size() && day.readings[i].timestamp < ws + window; ++i) {
      for (std::size_t p = 0; p < kPollutantCount; ++p) {
        mean[p] += day.readings[i].pollutants.values[p];
      }
      ++count;
    }
    WindowPrediction w;
    w.start = ws;
    w.end = ws + window;
    if (count == 0) {
      // No readings: inherit the previous window, or the next one at the start.
      if (last_filled) {
        w.proba = result.windows[*last_filled].proba;
        w.raw_label = result.windows[*last_filled].raw_label;
      } else {
        pending_empty.push_back(result.windows.size());
      }
      result.windows.push_back(std::move(w));
      continue;
    }
    for (double& v : mean) v /= static_cast<double>(count);
    if (model.input_scaling) {
      for (std::size_t p = 0; p < kPollutantCount; ++p) {
        mean[p] = NormalizeValue(*model.input_scaling, p, mean[p]);
      }
    }
    w.proba = PredictProbaRow(model, mean);
    w.raw_label = ArgMax(w.proba);
    last_filled = result.windows.size();
    result.windows.push_back(std::move(w));
    for (auto idx : pending_empty) {
      result.windows[idx].proba = result.windows.back().proba;
      result.windows[idx].raw_label = result.windows.back().raw_label;
    }
    pending_empty.clear();
  }
  if (!last_filled) throw Error(Errc::kEmptyDataset, "no window contains readings");

  std::vector<std::size_t> raw(result.windows.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = result.windows[i].raw_label;
  const auto smoothed = SmoothLabels(raw, options.votes);
  for (std::size_t i = 0; i < raw.size(); ++i) result.windows[i].smoothed_label = smoothed[i];

  const std::size_t n = result.windows.size();
  auto boundary = [&](std::size_t i) -> Timestamp {
    if (i == 0) return span_start;
    if (i == n) return span_end;
    return result.windows[i - 1].Center() + step / 2;
  };
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    double confidence = 0.0;
    while (j < n && smoothed[j] == smoothed[i]) {
      confidence += result.windows[j].proba[smoothed[i]];
      ++j;
    }
    result.timeline.segments.push_back(
        {boundary(i), boundary(j), classes[smoothed[i]], confidence / static_cast<double>(j - i)});
    i = j;
  }
  return result;
}

// Fraction of windows whose smoothed label matches the truth at the window
// centre, over windows whose centre falls inside a truth segment.
inline double WindowAccuracy(const Segmentation& seg, const ClassifierModel& model,
                             const ActivityTimeline& truth) {
  const auto classes = ActivityClasses(model);
  std::size_t total = 0, correct = 0;
  for (const auto& w : seg.windows) {
    const Timestamp c = w.Center();
    for (const auto& s : truth.segments) {
      if (c >= s.start && c < s.end) {
        ++total;
        if (classes[w.smoothed_label] == s.label) ++correct;
        break;
      }
    }
  }
  if (total == 0) throw Error(Errc::kEmptyInput, "no window overlaps the truth timeline");
  return static_cast<double>(correct) / static_cast<double>(total);
}

inline void to_json(nlohmann::json& j, const ActivityTimeline& t) {
  nlohmann::json segments = nlohmann::json::array();
  for (const auto& s : t.segments) {
    segments.push_back({{"start", FormatTimestamp(s.start)},
                        {"end", FormatTimestamp(s.end)},
                        {"label", ActivityName(s.label)},
                        {"confidence", s.confidence}});
  }
  j = nlohmann::json{{"schema_version", kTimelineSchemaVersion}, {"segments", std::move(segments)}};
}

inline ActivityTimeline TimelineFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kTimelineSchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "timeline schema_version " + std::to_string(version));
    }
    ActivityTimeline t;
    for (const auto& js : j.at("segments")) {
      const auto start = ParseTimestamp(js.at("start").get<std::string>());
      const auto end = ParseTimestamp(js.at("end").get<std::string>());
      const auto label = ParseActivity(js.at("label").get<std::string>());
      if (!start || !end || !label) throw Error(Errc::kCorruptDocument, "bad timeline segment");
      t.segments.push_back({*start, *end, *label, js.at("confidence").get<double>()});
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
}

inline std::string TimelineCsv(const ActivityTimeline& t) {
  std::string out = "start,end,label,confidence\n";
  char buf[64];
  for (const auto& s : t.segments) {
    std::snprintf(buf, sizeof buf, "%.6f", s.confidence);
    out += FormatTimestamp(s.start) + "," + FormatTimestamp(s.end) + "," +
           std::string(ActivityName(s.label)) + "," + buf + "\n";
  }
  return out;
}

}  // namespace aerolens

#endif  // AEROLENS_TIMELINE_HPP_
