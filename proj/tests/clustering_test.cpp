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

#include "aerolens/clustering.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "oracles.hpp"

namespace aerolens {
namespace {

using oracle::Blobs;
using oracle::ExhaustiveWcss;

Matrix RandomMatrix(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rng.Uniform();
  }
  return m;
}

TEST(KMeansFit, SeparatedDuplicates) {
  const Matrix x{{0, 0}, {0, 0}, {10, 10}, {10, 10}};
  const auto m = KMeansFit(x, 2, 1);
  EXPECT_EQ(m.wcss, 0.0);
  const bool order = m.centroids(0, 0) == 0.0;
  EXPECT_EQ(m.centroids(order ? 0 : 1, 1), 0.0);
  EXPECT_EQ(m.centroids(order ? 1 : 0, 0), 10.0);
}

TEST(KMeansFit, SingleClusterIsColumnMean) {
  const Matrix x = RandomMatrix(30, 5, 2);
  const auto m = KMeansFit(x, 1, 1);
  double total = 0.0;
  for (std::size_t j = 0; j < 5; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < 30; ++i) mean += x(i, j);
    mean /= 30;
    EXPECT_NEAR(m.centroids(0, j), mean, 1e-12);
    for (std::size_t i = 0; i < 30; ++i) total += (x(i, j) - mean) * (x(i, j) - mean);
  }
  EXPECT_NEAR(m.wcss, total, 1e-9);
}

TEST(KMeansFit, TwoTriadsMatchExhaustivePartition) {
  const Matrix x{{0, 0}, {0.1, 0}, {0, 0.2}, {5, 5}, {5.2, 5}, {5, 5.1}};
  const auto m = KMeansFit(x, 2, 3);
  EXPECT_NEAR(m.wcss, ExhaustiveWcss(x, 2), 1e-12);
  const auto labels = Assign(m, x);
  EXPECT_EQ(labels[0], labels[1]);
  EXPECT_EQ(labels[0], labels[2]);
  EXPECT_EQ(labels[3], labels[4]);
  EXPECT_NE(labels[0], labels[3]);
}

TEST(KMeansFit, SmallInstancesReachGlobalOptimum) {
  for (std::uint64_t trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + trial % 5;
    const std::size_t k = 2 + trial % 2;
    const Matrix x = RandomMatrix(n, 2, 100 + trial);
    EXPECT_NEAR(KMeansFit(x, k, trial).wcss, ExhaustiveWcss(x, k), 1e-9) << "n=" << n << " k=" << k;
  }
}

TEST(KMeansFit, TooFewPoints) {
  try {
    KMeansFit(Matrix{{1, 2}}, 2, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTooFewPoints);
  }
}

TEST(KMeansFit, DeterministicBitwise) {
  const Matrix x = RandomMatrix(300, 5, 9);
  const auto a = KMeansFit(x, 4, 77);
  const auto b = KMeansFit(x, 4, 77);
  EXPECT_EQ(a.centroids, b.centroids);
  EXPECT_EQ(a.wcss, b.wcss);
}

TEST(KMeansFit, StoredWcssMatchesReassignment) {
  const Matrix x = RandomMatrix(400, 5, 10);
  const auto m = KMeansFit(x, 5, 1);
  const auto labels = Assign(m, x);
  double w = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i)
    w += SquaredDistance(x.row(i), m.centroids.row(labels[i]));
  EXPECT_NEAR(w, m.wcss, 1e-9);
}

TEST(Lloyd, ObjectiveNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = RandomMatrix(200, 3, seed);
    Rng rng(seed);
    const auto run = detail::Lloyd(x, detail::KMeansPlusPlusSeed(x, 6, rng), {});
    for (std::size_t i = 1; i < run.wcss_trace.size(); ++i) {
      EXPECT_LE(run.wcss_trace[i], run.wcss_trace[i - 1] + 1e-12);
    }
    EXPECT_LE(run.wcss, run.wcss_trace.back() + 1e-12);
  }
}

TEST(Lloyd, EmptyClusterIsReseeded) {
  // Two centroids start on top of each other; one of them owns nothing.
  const Matrix x{{0, 0}, {0, 1}, {10, 0}, {10, 1}};
  const auto run = detail::Lloyd(x, Matrix{{5, 0.5}, {5, 0.5}, {0, 0.5}}, {});
  EXPECT_NEAR(run.wcss, 0.5, 1e-12);
  std::set<std::size_t> used;
  for (auto l : AssignToCentroids(run.centroids, x)) used.insert(l);
  EXPECT_EQ(used.size(), 3u);
}

// Brute force: no single point can change cluster and lower the wcss.
bool NoImprovingMove(const Matrix& x, const Matrix& centroids) {
  auto labels = AssignToCentroids(centroids, x);
  const std::size_t k = centroids.rows();
  auto wcss_of = [&](const std::vector<std::size_t>& l) {
    std::vector<std::vector<double>> sum(k, std::vector<double>(x.cols(), 0.0));
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      count[l[i]] += 1;
      for (std::size_t j = 0; j < x.cols(); ++j) sum[l[i]][j] += x(i, j);
    }
    double w = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t j = 0; j < x.cols(); ++j)
        w += std::pow(x(i, j) - sum[l[i]][j] / count[l[i]], 2);
    }
    return w;
  };
  const double base = wcss_of(labels);
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (sizes[labels[i]] < 2) continue;
    const auto own = labels[i];
    for (std::size_t c = 0; c < k; ++c) {
      if (c == own) continue;
      labels[i] = c;
      if (wcss_of(labels) < base - 1e-12) return false;
    }
    labels[i] = own;
  }
  return true;
}

TEST(TransferRefine, ImprovesLloydAndReachesTransferOptimum) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix x = RandomMatrix(25, 2, 100 + seed);
    Rng rng(seed);
    auto run = detail::Lloyd(x, detail::KMeansPlusPlusSeed(x, 4, rng), {});
    const double lloyd = run.wcss;
    detail::TransferRefine(x, run);
    EXPECT_LE(run.wcss, lloyd + 1e-12);
    EXPECT_NEAR(run.wcss, Wcss(run.centroids, x), 1e-12);
    EXPECT_TRUE(NoImprovingMove(x, run.centroids)) << seed;
  }
}

TEST(Assign, CentroidTieAndDistanceTable) {
  const Matrix centroids{{0, 0}, {2, 0}, {5, 5}};
  EXPECT_EQ(AssignToCentroids(centroids, Matrix{{5, 5}})[0], 2u);
  EXPECT_EQ(AssignToCentroids(centroids, Matrix{{1, 3}})[0], 0u);

  const Matrix c5 = RandomMatrix(4, 5, 1);
  const Matrix x = RandomMatrix(20, 5, 2);
  const auto labels = AssignToCentroids(c5, x);
  for (std::size_t i = 0; i < 20; ++i) {
    std::vector<double> table(4);
    for (std::size_t c = 0; c < 4; ++c) {
      for (std::size_t j = 0; j < 5; ++j) table[c] += std::pow(x(i, j) - c5(c, j), 2);
    }
    EXPECT_EQ(labels[i], static_cast<std::size_t>(std::min_element(table.begin(), table.end()) -
                                                  table.begin()));
  }
  try {
    AssignToCentroids(c5, Matrix{{1, 2}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDimensionMismatch);
  }
}

// Direct transcription of the silhouette definition, used as an oracle.
double SilhouetteOracle(const Matrix& x, const std::vector<std::size_t>& l) {
  double total = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::map<std::size_t, std::pair<double, int>> acc;
    for (std::size_t j = 0; j < x.rows(); ++j) {
      if (j == i) continue;
      auto& [s, c] = acc[l[j]];
      s += std::sqrt(SquaredDistance(x.row(i), x.row(j)));
      ++c;
    }
    if (!acc.count(l[i])) continue;
    const double a = acc[l[i]].first / acc[l[i]].second;
    double b = 1e300;
    for (auto& [label, sc] : acc) {
      if (label != l[i]) b = std::min(b, sc.first / sc.second);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(x.rows());
}

TEST(Silhouette, TwoPairs) {
  const Matrix x{{0, 0}, {0, 1}, {100, 100}, {100, 101}};
  const std::vector<std::size_t> l{0, 0, 1, 1};
  EXPECT_NEAR(Silhouette(x, l), 0.9929, 1e-3);
  EXPECT_NEAR(Silhouette(x, l), SilhouetteOracle(x, l), 1e-12);
}

TEST(Silhouette, AllSingletonsScoreZero) {
  const Matrix x{{0}, {1}, {5}};
  EXPECT_EQ(Silhouette(x, std::vector<std::size_t>{0, 1, 2}), 0.0);
}

TEST(Silhouette, InterleavedClustersScoreLow) {
  const Matrix x{{0}, {1}, {2}, {3}, {4}, {5}};
  const std::vector<std::size_t> l{0, 1, 0, 1, 0, 1};
  const double s = Silhouette(x, l);
  EXPECT_LT(s, 0.5);
  EXPECT_NEAR(s, SilhouetteOracle(x, l), 1e-12);
}

TEST(Silhouette, FarApartClustersAndErrors) {
  const Matrix x = Blobs({{0, 0}, {1000, 0}}, 10, 0.5, 3);
  std::vector<std::size_t> l(20, 0);
  for (std::size_t i = 10; i < 20; ++i) l[i] = 1;
  EXPECT_GE(Silhouette(x, l), 0.98);
  EXPECT_NEAR(Silhouette(x, l), SilhouetteOracle(x, l), 1e-12);
  try {
    Silhouette(x, std::vector<std::size_t>(20, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSingleCluster);
  }
}

TEST(ElbowSelect, ThreeBlobs) {
  const Matrix x = Blobs({{0.1, 0.1}, {0.9, 0.2}, {0.4, 0.9}}, 60, 0.03, 5);
  const auto curve = ElbowSelect(x, 2, 8, 42);
  EXPECT_EQ(curve.chosen_k, 3u);
  ASSERT_EQ(curve.points.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(curve.points[i].k, 2 + i);
}

TEST(ElbowSelect, TwoBlobsPicksLowerBoundary) {
  const Matrix x = Blobs({{0.1, 0.1}, {0.9, 0.8}}, 60, 0.03, 6);
  EXPECT_EQ(ElbowSelect(x, 2, 6, 42).chosen_k, 2u);
}

TEST(ElbowSelect, Errors) {
  const Matrix x = RandomMatrix(5, 2, 1);
  EXPECT_THROW(ElbowSelect(x, 2, 6, 1), Error);
  EXPECT_THROW(ElbowSelect(x, 3, 3, 1), Error);
}

TEST(ChooseElbow, LinearCurveTiesToFirstInterior) {
  const std::vector<double> wcss{10, 8, 6, 4, 2};
  EXPECT_EQ(ChooseElbow(2, wcss), 3u);
}

TEST(ChooseElbow, PicksSharpestBend) {
  const std::vector<double> wcss{100, 40, 10, 9, 8, 7};
  std::vector<std::optional<double>> d2;
  EXPECT_EQ(ChooseElbow(2, wcss, std::nullopt, std::nullopt, &d2), 3u);
  EXPECT_FALSE(d2.front());
  EXPECT_DOUBLE_EQ(*d2[1], 30.0);
}

TEST(ClusterModel, JsonRoundTripAndVersion) {
  const Matrix x = RandomMatrix(50, 5, 3);
  NormalizationParams norm;
  norm.max = {1, 2, 3, 4, 5};
  const auto m = KMeansFit(x, 3, 8, {}, norm);
  nlohmann::json j = m;
  const auto back = ClusterModelFromJson(j);
  EXPECT_EQ(back.centroids, m.centroids);
  EXPECT_EQ(back.normalization, m.normalization);
  EXPECT_EQ(back.wcss, m.wcss);
  EXPECT_EQ(back.k, 3u);
  j["schema_version"] = 99;
  try {
    ClusterModelFromJson(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSchemaVersionMismatch);
  }
  j = m;
  j.erase("centroids");
  EXPECT_THROW(ClusterModelFromJson(j), Error);
}

}  // namespace
}  // namespace aerolens
