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

// Walks through the library API in memory: a synthetic three-activity
// reference corpus is clustered, a tree learns the clusters, exact Shapley
// values turn into weight factors, clusters are ranked by potency and a
// synthetic person's day is scored.

#include <cstdio>
#include <vector>

#include "aerolens/aerolens.hpp"

using namespace aerolens;

int main() {
  const std::uint64_t seed = 7;
  Dataset corpus;
  Timestamp t = *ParseDate("2023-07-28");
  const ActivityLabel blocks[] = {ActivityLabel::kCooking, ActivityLabel::kSmoking,
                                  ActivityLabel::kAirConditioning};
  for (std::size_t i = 0; i < std::size(blocks); ++i) {
    auto trace = GenerateActivityTrace(blocks[i], 400, 60, DeriveSeed(seed, "demo", i), {t, {}});
    t += static_cast<Timestamp>(trace.size()) * 60;
    corpus.readings.insert(corpus.readings.end(), trace.readings.begin(), trace.readings.end());
  }

  const NormalizationParams norm = FitNormalizer(corpus);
  const Matrix x = ApplyNormalizer(norm, corpus);
  const ClusterModel clusters = KMeansFit(x, 3, seed, {}, norm);
  const auto labels = Assign(clusters, x);
  std::printf("k-means: wcss %.3f after %zu iterations\n", clusters.wcss, clusters.iterations_run);

  std::vector<int> y(labels.begin(), labels.end());
  const ClassifierModel tree = TrainClassifier(x, y, {"C0", "C1", "C2"}, {}, seed);
  const Matrix background =
      x.SelectRows(std::vector<std::size_t>{0, 150, 300, 450, 600, 750, 900, 1050});
  const auto importance =
      MeanAbsShap(tree, x.SelectRows(std::vector<std::size_t>{10, 420, 820}), background);
  const WeightFactors weights = DeriveWeightFactors(importance);

  std::printf("\n%-6s %10s %8s\n", "", "mean|phi|", "W");
  for (Pollutant p : kAllPollutants) {
    std::printf("%-6s %10.4f %8.4f\n", std::string(PollutantKey(p)).c_str(), importance[Index(p)],
                weights[p]);
  }

  const PotencyTable table = ClusterPotencyTable(clusters, corpus, weights);
  std::printf("\ncluster  n     dominant  mean      potency\n");
  for (std::size_t id : table.ranking) {
    const auto& c = table.clusters[id];
    std::printf("C%-7zu %-5zu %-9s %-9.3f %.1f\n", c.cluster, c.instance_count,
                std::string(PollutantKey(c.dominant)).c_str(), c.dominant_mean, c.potency);
  }

  DayOptions day;
  day.day_start = *ParseDate("2023-07-29");
  day.person_id = "demo";
  const auto [readings, truth] =
      GenerateDaySchedule({{7 * 60, 45, ActivityLabel::kCooking},
                           {13 * 60, 180, ActivityLabel::kAirConditioning},
                           {21 * 60, 20, ActivityLabel::kSmoking}},
                          seed, day);
  const auto counts = PersonalClusterCounts(clusters, Preprocess(readings).first);
  std::printf("\nday of %zu readings (%zu scheduled blocks): counts", readings.size(),
              truth.segments.size());
  for (auto c : counts) std::printf(" %zu", c);
  std::printf(", total exposure %.1f\n", TotalExposure(counts, table));
  return 0;
}
