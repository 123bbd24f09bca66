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

#ifndef AEROLENS_CLUSTERING_HPP_
#define AEROLENS_CLUSTERING_HPP_

// K-means (Lloyd iterations, k-means++ seeding, best of several restarts),
// elbow-based k selection and silhouette scoring.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/random.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kClusterModelSchemaVersion = 1;

struct KMeansOptions {
  std::size_t max_iter = 300;
  double tol = 1e-6;
  std::size_t n_restarts = 10;
};

struct ClusterModel {
  std::size_t k = 0;
  Matrix centroids;  // k x d, normalized feature space
  NormalizationParams normalization;
  double wcss = 0.0;
  std::size_t iterations_run = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const ClusterModel&, const ClusterModel&) = default;
};

// Nearest centroid by squared Euclidean distance; ties go to the lower index.
inline std::size_t NearestCentroid(const Matrix& centroids, std::span<const double> point,
                                   double* distance = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = SquaredDistance(centroids.row(c), point);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

inline std::vector<std::size_t> AssignToCentroids(const Matrix& centroids, const Matrix& points) {
  if (points.cols() != centroids.cols()) {
    throw Error(Errc::kDimensionMismatch, "point width " + std::to_string(points.cols()) +
                                              " differs from centroid width " +
                                              std::to_string(centroids.cols()));
  }
  std::vector<std::size_t> labels(points.rows());
  for (std::size_t r = 0; r < points.rows(); ++r)
    labels[r] = NearestCentroid(centroids, points.row(r));
  return labels;
}

inline std::vector<std::size_t> Assign(const ClusterModel& model, const Matrix& points) {
  return AssignToCentroids(model.centroids, points);
}

inline double Wcss(const Matrix& centroids, const Matrix& points) {
  double total = 0.0;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    double d = 0.0;
    NearestCentroid(centroids, points.row(r), &d);
    total += d;
  }
  return total;
}

namespace detail {

struct LloydRun {
  Matrix centroids;
  double wcss = 0.0;
  std::size_t iterations = 0;
  std::vector<double> wcss_trace;  // objective after each assignment step
};

inline Matrix KMeansPlusPlusSeed(const Matrix& points, std::size_t k, Rng& rng) {
  const std::size_t n = points.rows();
  Matrix centroids(k, points.cols());
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t chosen = rng.Index(n);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double d : nearest) total += d;
      if (total > 0.0) {
        double target = rng.Uniform() * total;
        chosen = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          target -= nearest[i];
          if (target < 0.0 && nearest[i] > 0.0) {
            chosen = i;
            break;
          }
        }
      } else {
        chosen = rng.Index(n);
      }
    }
    const auto src = points.row(chosen);
    std::copy(src.begin(), src.end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(points.row(i), centroids.row(c)));
    }
  }
  return centroids;
}

inline LloydRun Lloyd(const Matrix& points, Matrix centroids, const KMeansOptions& options) {
  const std::size_t n = points.rows();
  const std::size_t k = centroids.rows();
  const std::size_t d = points.cols();
  LloydRun run;
  std::vector<std::size_t> labels(n);
  std::vector<double> dist(n);
  for (std::size_t iter = 0; iter < options.max_iter; ++iter) {
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = NearestCentroid(centroids, points.row(i), &dist[i]);
      objective += dist[i];
    }
    run.wcss_trace.push_back(objective);

    Matrix next(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      auto dst = next.row(labels[i]);
      const auto src = points.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Reseed an empty cluster at the point farthest from its centroid.
        const auto far =
            static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
        const auto src = points.row(far);
        std::copy(src.begin(), src.end(), next.row(c).begin());
        dist[far] = 0.0;
        continue;
      }
      for (double& v : next.row(c)) v /= static_cast<double>(counts[c]);
    }

    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(SquaredDistance(next.row(c), centroids.row(c))));
    }
    centroids = std::move(next);
    run.iterations = iter + 1;
    if (shift < options.tol) break;
  }
  run.wcss = Wcss(centroids, points);
  run.centroids = std::move(centroids);
  return run;
}

// Hartigan-style single-point transfers from a Lloyd fixed point: move a
// point to another cluster whenever that lowers the wcss, using the exact
// change n_b/(n_b+1) |x - c_b|^2 - n_a/(n_a-1) |x - c_a|^2. Lloyd stops at
// configurations where such a move still helps; this removes them.
inline void TransferRefine(const Matrix& points, LloydRun& run) {
  const std::size_t n = points.rows();
  const std::size_t k = run.centroids.rows();
  const std::size_t d = points.cols();
  auto labels = AssignToCentroids(run.centroids, points);
  auto recompute = [&] {
    Matrix means(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      auto dst = means.row(labels[i]);
      const auto src = points.row(i);
      for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        const auto keep = run.centroids.row(c);
        std::copy(keep.begin(), keep.end(), means.row(c).begin());
        continue;
      }
      for (double& v : means.row(c)) v /= static_cast<double>(counts[c]);
    }
    run.centroids = std::move(means);
    return counts;
  };
  auto counts = recompute();
  for (std::size_t pass = 0; pass < 100; ++pass) {
    bool moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = labels[i];
      if (counts[a] < 2) continue;
      const auto x = points.row(i);
      const double na = static_cast<double>(counts[a]);
      const double removal = na / (na - 1.0) * SquaredDistance(x, run.centroids.row(a));
      std::size_t best = a;
      double best_gain = 1e-12 * (1.0 + removal);
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double nb = static_cast<double>(counts[b]);
        const double gain = removal - nb / (nb + 1.0) * SquaredDistance(x, run.centroids.row(b));
        if (gain > best_gain) {
          best_gain = gain;
          best = b;
        }
      }
      if (best == a) continue;
      auto ca = run.centroids.row(a);
      auto cb = run.centroids.row(best);
      const double nb = static_cast<double>(counts[best]);
      for (std::size_t j = 0; j < d; ++j) {
        ca[j] = (na * ca[j] - x[j]) / (na - 1.0);
        cb[j] = (nb * cb[j] + x[j]) / (nb + 1.0);
      }
      --counts[a];
      ++counts[best];
      labels[i] = best;
      moved = true;
    }
    if (!moved) break;
    // Drop accumulated rounding before the next sweep.
    counts = recompute();
  }
  recompute();
  run.wcss = Wcss(run.centroids, points);
}

}  // namespace detail

// Fits on an already normalized matrix. `normalization` is stored with the
// model so raw readings can later be mapped into the same space.
inline ClusterModel KMeansFit(const Matrix& points, std::size_t k, std::uint64_t seed,
                              const KMeansOptions& options = {},
                              const NormalizationParams& normalization = {}) {
  if (k == 0) throw Error(Errc::kInvalidArgument, "k must be at least 1");
  if (points.rows() < k) {
    throw Error(Errc::kTooFewPoints,
                std::to_string(points.rows()) + " rows for k = " + std::to_string(k));
  }
  if (options.max_iter == 0 || !(options.tol >= 0.0) || options.n_restarts == 0) {
    throw Error(Errc::kInvalidArgument, "max_iter and n_restarts must be >= 1, tol >= 0");
  }
  std::optional<detail::LloydRun> best;
  for (std::size_t restart = 0; restart < options.n_restarts; ++restart) {
    Rng rng(DeriveSeed(seed, "kmeans/restart", restart));
    auto run = detail::Lloyd(points, detail::KMeansPlusPlusSeed(points, k, rng), options);
    detail::TransferRefine(points, run);
    if (!best || run.wcss < best->wcss) best = std::move(run);
  }
  ClusterModel model;
  model.k = k;
  model.centroids = std::move(best->centroids);
  model.normalization = normalization;
  model.wcss = best->wcss;
  model.iterations_run = best->iterations;
  model.seed = seed;
  return model;
}

// Mean silhouette over all points with Euclidean distance. Points in
// singleton clusters score 0.
inline double Silhouette(const Matrix& points, std::span<const std::size_t> labels) {
  if (labels.size() != points.rows()) {
    throw Error(Errc::kLengthMismatch, "one label per row required");
  }
  if (points.empty()) throw Error(Errc::kEmptyInput, "silhouette of zero points");
  const std::size_t n_labels = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> sizes(n_labels, 0);
  for (auto l : labels) ++sizes[l];
  const auto distinct = std::count_if(sizes.begin(), sizes.end(), [](auto s) { return s > 0; });
  if (distinct < 2) throw Error(Errc::kSingleCluster, "silhouette needs at least two clusters");

  double total = 0.0;
  std::vector<double> sums(n_labels);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    if (sizes[labels[i]] == 1) continue;
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < points.rows(); ++j) {
      if (i == j) continue;
      sums[labels[j]] += std::sqrt(SquaredDistance(points.row(i), points.row(j)));
    }
    const double a = sums[labels[i]] / static_cast<double>(sizes[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_labels; ++c) {
      if (c == labels[i] || sizes[c] == 0) continue;
      b = std::min(b, sums[c] / static_cast<double>(sizes[c]));
    }
    const double denom = std::max(a, b);
    if (denom > 0.0) total += (b - a) / denom;
  }
  return total / static_cast<double>(points.rows());
}

struct ElbowPoint {
  std::size_t k = 0;
  double wcss = 0.0;
  std::optional<double> second_difference;
  Matrix centroids;
};

struct ElbowCurve {
  std::vector<ElbowPoint> points;
  std::size_t chosen_k = 0;
};

// Picks the knee of a WCSS curve: the k maximizing
// wcss(k-1) - 2 wcss(k) + wcss(k+1), smallest k on ties. `wcss` lists the
// curve for consecutive k starting at `first_k`; only interior entries have
// both neighbours. `below` / `above` optionally extend the curve one step
// past either end so the end points become eligible.
inline std::size_t ChooseElbow(std::size_t first_k, std::span<const double> wcss,
                               std::optional<double> below = std::nullopt,
                               std::optional<double> above = std::nullopt,
                               std::vector<std::optional<double>>* differences = nullptr) {
  const std::size_t n = wcss.size();
  if (n == 0) throw Error(Errc::kEmptyInput, "empty WCSS curve");
  std::vector<std::optional<double>> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::optional<double> prev = i > 0 ? std::optional<double>(wcss[i - 1]) : below;
    const std::optional<double> next = i + 1 < n ? std::optional<double>(wcss[i + 1]) : above;
    if (prev && next) d2[i] = *prev - 2.0 * wcss[i] + *next;
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (d2[i] && (!best || *d2[i] > *d2[*best])) best = i;
  }
  if (differences) *differences = d2;
  // Fewer than three points and no extension: nothing to compare.
  return first_k + best.value_or(0);
}

// Fits every k in [k_min, k_max]; k_min - 1 and, when the data allows,
// k_max + 1 are fitted too so both ends of the range can be chosen.
inline ElbowCurve ElbowSelect(const Matrix& points, std::size_t k_min, std::size_t k_max,
                              std::uint64_t seed, const KMeansOptions& options = {}) {
  if (k_min < 2 || k_min >= k_max) {
    throw Error(Errc::kInvalidArgument, "elbow range needs 2 <= k_min < k_max");
  }
  if (k_max > points.rows()) {
    throw Error(Errc::kTooFewPoints,
                std::to_string(points.rows()) + " rows for k_max = " + std::to_string(k_max));
  }
  auto fit = [&](std::size_t k) { return KMeansFit(points, k, seed, options).wcss; };
  std::vector<double> wcss;
  std::vector<Matrix> centroids;
  for (std::size_t k = k_min; k <= k_max; ++k) {
    auto model = KMeansFit(points, k, seed, options);
    wcss.push_back(model.wcss);
    centroids.push_back(std::move(model.centroids));
  }
  const double below = fit(k_min - 1);
  const std::optional<double> above =
      k_max + 1 <= points.rows() ? std::optional<double>(fit(k_max + 1)) : std::nullopt;
  std::vector<std::optional<double>> d2;
  ElbowCurve curve;
  curve.chosen_k = ChooseElbow(k_min, wcss, below, above, &d2);
  for (std::size_t i = 0; i < wcss.size(); ++i) {
    curve.points.push_back({k_min + i, wcss[i], d2[i], std::move(centroids[i])});
  }
  return curve;
}

inline void to_json(nlohmann::json& j, const ClusterModel& m) {
  nlohmann::json centroids = nlohmann::json::array();
  for (std::size_t c = 0; c < m.centroids.rows(); ++c) {
    const auto row = m.centroids.row(c);
    centroids.push_back(std::vector<double>(row.begin(), row.end()));
  }
  j = nlohmann::json{{"schema_version", kClusterModelSchemaVersion},
                     {"k", m.k},
                     {"centroids", std::move(centroids)},
                     {"normalization", m.normalization},
                     {"wcss", m.wcss},
                     {"iterations_run", m.iterations_run},
                     {"seed", m.seed}};
}

inline ClusterModel ClusterModelFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kClusterModelSchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "cluster model schema_version " + std::to_string(version));
    }
    ClusterModel m;
    m.k = j.at("k").get<std::size_t>();
    for (const auto& row : j.at("centroids")) {
      m.centroids.AppendRow(row.get<std::vector<double>>());
    }
    if (m.k == 0 || m.centroids.rows() != m.k) {
      throw Error(Errc::kCorruptDocument, "centroid count differs from k");
    }
    m.normalization = j.at("normalization").get<NormalizationParams>();
    m.wcss = j.at("wcss").get<double>();
    m.iterations_run = j.at("iterations_run").get<std::size_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
}

}  // namespace aerolens

#endif  // AEROLENS_CLUSTERING_HPP_
