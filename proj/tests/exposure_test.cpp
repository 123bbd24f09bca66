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

#include "aerolens/exposure.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "aerolens/generator.hpp"

namespace aerolens {
namespace {

PotencyTable TableWith(std::vector<double> potencies) {
  PotencyTable t;
  t.tracked = DefaultTrackedPollutants();
  for (std::size_t i = 0; i < potencies.size(); ++i) {
    ClusterPotency c;
    c.cluster = i;
    c.potency = potencies[i];
    t.clusters.push_back(c);
  }
  return t;
}

// Reference model fitted on three activity traces.
struct Reference {
  Dataset data;
  ClusterModel model;
};

Reference FitReference() {
  Reference ref;
  Timestamp t = 0;
  const ActivityLabel acts[] = {ActivityLabel::kCooking, ActivityLabel::kSmoking,
                                ActivityLabel::kAirConditioning};
  for (std::size_t i = 0; i < 3; ++i) {
    auto trace = GenerateActivityTrace(acts[i], 200, 60, 10 + i, {t, {}});
    t += 200 * 60;
    ref.data.readings.insert(ref.data.readings.end(), trace.readings.begin(), trace.readings.end());
  }
  const auto norm = FitNormalizer(ref.data);
  ref.model = KMeansFit(ApplyNormalizer(norm, ref.data), 3, 4, {}, norm);
  return ref;
}

TEST(TotalExposure, Arithmetic) {
  const auto t = TableWith({5, 2, 3.6});
  EXPECT_EQ(TotalExposure(std::vector<std::size_t>{0, 0, 0}, t), 0.0);
  EXPECT_NEAR(TotalExposure(std::vector<std::size_t>{100, 200, 50}, t), 1080.0, 1e-9);
  EXPECT_NEAR(TotalExposure(std::vector<std::size_t>{1, 1758, 3}, t), 3531.8, 1e-9);
  try {
    TotalExposure(std::vector<std::size_t>{1, 2}, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kLengthMismatch);
  }
}

TEST(PersonalClusterCounts, AllAtOneCentroid) {
  const auto ref = FitReference();
  Dataset day;
  PollutantVector v;
  for (std::size_t j = 0; j < 5; ++j) {
    v.values[j] = DenormalizeValue(ref.model.normalization, j, ref.model.centroids(1, j));
  }
  for (int i = 0; i < 1440; ++i) day.readings.push_back({i * 60, v, {}, {}});
  EXPECT_EQ(PersonalClusterCounts(ref.model, day), (std::vector<std::size_t>{0, 1440, 0}));
  EXPECT_THROW(PersonalClusterCounts(ref.model, Dataset{}), Error);
}

TEST(PersonalClusterCounts, MatchesDistanceTableTally) {
  const auto ref = FitReference();
  const auto [day, truth] = GenerateDaySchedule(
      {{420, 60, ActivityLabel::kCooking}, {800, 300, ActivityLabel::kAirConditioning}}, 8);
  std::vector<std::size_t> oracle(3, 0);
  for (const auto& r : day.readings) {
    double best = 1e300;
    std::size_t arg = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      double d = 0.0;
      for (std::size_t j = 0; j < 5; ++j) {
        const auto& n = ref.model.normalization;
        const double scaled = n.max[j] == n.min[j]
                                  ? 0.0
                                  : (r.pollutants.values[j] - n.min[j]) / (n.max[j] - n.min[j]);
        d += (scaled - ref.model.centroids(c, j)) * (scaled - ref.model.centroids(c, j));
      }
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    ++oracle[arg];
  }
  const auto counts = PersonalClusterCounts(ref.model, day);
  EXPECT_EQ(counts, oracle);
  EXPECT_EQ(counts[0] + counts[1] + counts[2], day.size());
}

TEST(TotalExposure, AdditiveOverDaySplits) {
  const auto ref = FitReference();
  const auto table = TableWith({5, 2, 3.6});
  const auto [day, truth] = GenerateDaySchedule({{420, 60, ActivityLabel::kSmoking}}, 2);
  const double whole = TotalExposure(PersonalClusterCounts(ref.model, day), table);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t cut = 1 + rng.Index(day.size() - 1);
    Dataset a, b;
    a.readings.assign(day.readings.begin(), day.readings.begin() + static_cast<long>(cut));
    b.readings.assign(day.readings.begin() + static_cast<long>(cut), day.readings.end());
    const double parts = TotalExposure(PersonalClusterCounts(ref.model, a), table) +
                         TotalExposure(PersonalClusterCounts(ref.model, b), table);
    EXPECT_NEAR(parts, whole, 1e-9);
  }
}

TEST(MatchClusters, GreedyBijection) {
  const Matrix reference{{0, 0}, {1, 0}, {0, 1}};
  const Matrix fitted{{0.9, 0.1}, {0.1, 0.9}, {0.05, 0.0}};
  EXPECT_EQ(MatchClusters(fitted, reference), (std::vector<std::size_t>{1, 2, 0}));
}

TEST(ReclusteredCounts, AgreesWithFrozenOnSeparatedDay) {
  const auto ref = FitReference();
  Dataset day;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto part = Dataset{std::vector<Reading>(ref.data.readings.begin() + 200 * i,
                                                   ref.data.readings.begin() + 200 * i + 50),
                              ""};
    day.readings.insert(day.readings.end(), part.readings.begin(), part.readings.end());
  }
  const auto frozen = PersonalClusterCounts(ref.model, day);
  const auto re = ReclusteredCounts(ref.model, day, 3);
  EXPECT_EQ(re, frozen);
}

TEST(PollutantExposure, WeightedSums) {
  Dataset d;
  d.readings.push_back({0, PollutantVector{{1, 100, 3, 0, 0}}, {}, {}});
  d.readings.push_back({60, PollutantVector{{2, 200, 4, 0, 0}}, {}, {}});
  WeightFactors w;
  EXPECT_EQ(PollutantExposure(d, w, DefaultTrackedPollutants()), (std::vector<double>{3, 300, 7}));
  w.weights = {0.5, 0.5, 0.5, 0.5, 0.5};
  EXPECT_EQ(PollutantExposure(d, w, DefaultTrackedPollutants()),
            (std::vector<double>{1.5, 150, 3.5}));
}

TEST(PollutantExposure, StreamingSumOracle) {
  const auto [day, truth] = GenerateDaySchedule({{60, 120, ActivityLabel::kIncenseStick}}, 4);
  WeightFactors w;
  w.weights = {0.2, 1.0, 0.7, 0.4, 0.3};
  const std::vector<Pollutant> all(kAllPollutants.begin(), kAllPollutants.end());
  const auto e = PollutantExposure(day, w, all);
  for (std::size_t j = 0; j < 5; ++j) {
    // Kahan summation as an independent accumulator.
    double sum = 0.0, comp = 0.0;
    for (const auto& r : day.readings) {
      const double y = r.pollutants.values[j] - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    EXPECT_NEAR(e[j], w.weights[j] * sum, 1e-6 * e[j]);
  }
}

TEST(NormalizeCohort, TableFiveRows) {
  const auto voc = NormalizeCohort({{121}, {102}, {100}});
  EXPECT_EQ(RoundHalfUp(voc[0][0], 2), 1.21);
  EXPECT_EQ(RoundHalfUp(voc[1][0], 2), 1.02);
  EXPECT_EQ(voc[2][0], 1.0);
  for (double c : {0.3, 1.0, 417.0}) {
    const auto pm10 = NormalizeCohort({{15.8 * c}, {c}, {6.7 * c}});
    EXPECT_EQ(RoundHalfUp(pm10[0][0], 2), 15.8);
    EXPECT_EQ(pm10[1][0], 1.0);
    EXPECT_EQ(RoundHalfUp(pm10[2][0], 2), 6.7);
  }
  EXPECT_EQ(NormalizeCohort({{3, 4, 5}}), (std::vector<std::vector<double>>{{1, 1, 1}}));
  try {
    NormalizeCohort({{1}, {0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kNonPositiveRaw);
  }
}

TEST(BuildCohortReports, TotalsAndMinimumColumn) {
  const auto ref = FitReference();
  const auto table = ClusterPotencyTable(ref.model, ref.data, WeightFactors{});
  std::vector<PersonDay> cohort;
  for (std::uint64_t p = 0; p < 3; ++p) {
    DayOptions options;
    options.person_id = "p" + std::to_string(p);
    auto [day, truth] = GenerateDaySchedule(
        {{300 + 60 * static_cast<int>(p), 45 + 30 * static_cast<int>(p), ActivityLabel::kCooking}},
        p, options);
    cohort.push_back({*options.person_id, std::move(day)});
  }
  const auto reports = BuildCohortReports(ref.model, table, cohort);
  ASSERT_EQ(reports.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) {
    double minimum = 1e300;
    for (const auto& r : reports) minimum = std::min(minimum, r.normalized_exposure[j]);
    EXPECT_EQ(minimum, 1.0);
  }
  for (const auto& r : reports) {
    double recheck = 0.0;
    for (std::size_t c = 0; c < 3; ++c)
      recheck += static_cast<double>(r.counts[c]) * r.potencies[c];
    EXPECT_NEAR(r.total_exposure, recheck, 1e-9);
    EXPECT_EQ(r.date, "1970-01-01");
    const nlohmann::json j = r;
    EXPECT_TRUE(j.contains("normalized_exposure_2dp"));
  }
}

}  // namespace
}  // namespace aerolens
