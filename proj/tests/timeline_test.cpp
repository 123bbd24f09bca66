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

#include "aerolens/timeline.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/generator.hpp"
#include "aerolens/preprocess.hpp"

namespace aerolens {
namespace {

// Decision tree over the five activities, trained on 200 minutes of each.
const ClassifierModel& ActivityModel() {
  static const ClassifierModel model = [] {
    Dataset corpus;
    std::vector<int> y;
    std::vector<std::string> classes;
    for (std::size_t a = 0; a < kSourceActivities.size(); ++a) {
      const auto trace = GenerateActivityTrace(kSourceActivities[a], 200, 60, 100 + a);
      corpus.readings.insert(corpus.readings.end(), trace.readings.begin(), trace.readings.end());
      y.insert(y.end(), trace.size(), static_cast<int>(a));
      classes.emplace_back(ActivityName(kSourceActivities[a]));
    }
    const auto norm = FitNormalizer(corpus);
    auto m = TrainClassifier(ApplyNormalizer(norm, corpus), y, classes, {}, 1);
    m.target = "activity";
    m.input_scaling = norm;
    return m;
  }();
  return model;
}

void ExpectTiling(const ActivityTimeline& t, Timestamp start, Timestamp end) {
  ASSERT_FALSE(t.segments.empty());
  EXPECT_EQ(t.segments.front().start, start);
  EXPECT_EQ(t.segments.back().end, end);
  for (std::size_t i = 0; i < t.segments.size(); ++i) {
    EXPECT_LT(t.segments[i].start, t.segments[i].end);
    EXPECT_GE(t.segments[i].confidence, 0.0);
    EXPECT_LE(t.segments[i].confidence, 1.0);
    if (i > 0) {
      EXPECT_EQ(t.segments[i].start, t.segments[i - 1].end);
      EXPECT_NE(t.segments[i].label, t.segments[i - 1].label);
    }
  }
}

TEST(SmoothLabels, AbsorbsIsolatedWindow) {
  EXPECT_EQ(SmoothLabels({0, 0, 1, 0, 0}, 3), (std::vector<std::size_t>{0, 0, 0, 0, 0}));
  EXPECT_EQ(SmoothLabels({0, 0, 1, 1, 1}, 3), (std::vector<std::size_t>{0, 0, 1, 1, 1}));
  EXPECT_EQ(SmoothLabels({2, 0, 1}, 1), (std::vector<std::size_t>{2, 0, 1}));
  // Three-way tie keeps the window's own label.
  EXPECT_EQ(SmoothLabels({2, 0, 1}, 3), (std::vector<std::size_t>{2, 0, 1}));
}

TEST(SegmentActivities, HomogeneousDayIsOneSegment) {
  const auto [day, truth] = GenerateDaySchedule({{0, 1440, ActivityLabel::kCooking}}, 3);
  const auto seg = SegmentActivities(ActivityModel(), day);
  ASSERT_EQ(seg.timeline.segments.size(), 1u);
  EXPECT_EQ(seg.timeline.segments[0].label, ActivityLabel::kCooking);
  ExpectTiling(seg.timeline, 0, 86400);
}

TEST(SegmentActivities, FourBlocksRecoverBoundaries) {
  const std::vector<ScheduleSegment> schedule = {{0, 360, ActivityLabel::kSmoking},
                                                 {360, 360, ActivityLabel::kIncenseStick},
                                                 {720, 360, ActivityLabel::kAirConditioning},
                                                 {1080, 360, ActivityLabel::kPaperBurning}};
  const auto [day, truth] = GenerateDaySchedule(schedule, 9);
  const auto seg = SegmentActivities(ActivityModel(), day);
  ExpectTiling(seg.timeline, 0, 86400);
  ASSERT_EQ(seg.timeline.segments.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(seg.timeline.segments[i].label, schedule[i].activity);
    EXPECT_LE(std::abs(seg.timeline.segments[i].start - schedule[i].start_minute * 60), 15 * 60);
  }
  EXPECT_GE(WindowAccuracy(seg, ActivityModel(), truth), 0.95);
}

TEST(SegmentActivities, InvariantsOnMixedDay) {
  const auto [day, truth] = GenerateDaySchedule({{400, 45, ActivityLabel::kCooking},
                                                 {700, 20, ActivityLabel::kSmoking},
                                                 {1200, 90, ActivityLabel::kIncenseStick}},
                                                5);
  SegmentOptions options;
  options.votes = 5;
  const auto seg = SegmentActivities(ActivityModel(), day, options);
  ExpectTiling(seg.timeline, 0, 86400);
  for (std::size_t i = 1; i < seg.windows.size(); ++i) {
    EXPECT_EQ(seg.windows[i].start - seg.windows[i - 1].start, 300);
  }
  const auto again = SegmentActivities(ActivityModel(), day, options);
  EXPECT_EQ(again.timeline, seg.timeline);
}

TEST(SegmentActivities, WindowLargerThanData) {
  const auto trace = GenerateActivityTrace(ActivityLabel::kCooking, 10, 60, 1);
  try {
    SegmentActivities(ActivityModel(), trace);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kWindowLargerThanData);
  }
  SegmentOptions bad;
  bad.votes = 0;
  EXPECT_THROW(SegmentActivities(ActivityModel(), trace, bad), Error);
}

TEST(SegmentActivities, GapsInheritNeighbours) {
  auto [day, truth] = GenerateDaySchedule({{0, 1440, ActivityLabel::kSmoking}}, 4);
  // Drop an hour of readings in the middle of the day.
  std::erase_if(day.readings,
                [](const Reading& r) { return r.timestamp >= 36000 && r.timestamp < 39600; });
  const auto seg = SegmentActivities(ActivityModel(), day);
  ASSERT_EQ(seg.timeline.segments.size(), 1u);
  EXPECT_EQ(seg.timeline.segments[0].label, ActivityLabel::kSmoking);
}

TEST(Timeline, JsonRoundTripAndCsv) {
  ActivityTimeline t;
  t.segments.push_back({0, 3600, ActivityLabel::kCooking, 0.875});
  t.segments.push_back({3600, 86400, ActivityLabel::kPaperBurning, 1.0});
  const nlohmann::json j = t;
  EXPECT_EQ(j.at("schema_version"), kTimelineSchemaVersion);
  EXPECT_EQ(TimelineFromJson(nlohmann::json::parse(j.dump())), t);
  const auto csv = TimelineCsv(t);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_EQ(csv.rfind("start,end,label,confidence\n", 0), 0u);
  EXPECT_NE(csv.find(",Cooking,0.875000\n"), std::string::npos);

  auto wrong = j;
  wrong["schema_version"] = 99;
  try {
    TimelineFromJson(wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSchemaVersionMismatch);
  }
  EXPECT_THROW(TimelineFromJson(nlohmann::json{{"schema_version", 1}}), Error);
}

}  // namespace
}  // namespace aerolens
