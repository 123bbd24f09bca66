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

#ifndef AEROLENS_EXPOSURE_HPP_
#define AEROLENS_EXPOSURE_HPP_

// Personal 24-hour exposure: per-cluster reading counts weighted by cluster
// potency, plus per-pollutant weighted intake normalized across a cohort.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "aerolens/clustering.hpp"
#include "aerolens/error.hpp"
#include "aerolens/potency.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/types.hpp"
#include "aerolens/weights.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kExposureSchemaVersion = 1;

// Readings per reference cluster, each reading going to its nearest frozen
// reference centroid.
inline std::vector<std::size_t> PersonalClusterCounts(const ClusterModel& model,
                                                      const Dataset& personal) {
  if (personal.empty()) throw Error(Errc::kEmptyDataset, "personal dataset is empty");
  std::vector<std::size_t> counts(model.k, 0);
  for (auto label : Assign(model, ApplyNormalizer(model.normalization, personal))) ++counts[label];
  return counts;
}

// Maps each cluster of `fitted` to a distinct reference cluster: all
// (fitted, reference) pairs in order of centroid distance, taken greedily.
inline std::vector<std::size_t> MatchClusters(const Matrix& fitted, const Matrix& reference) {
  if (fitted.rows() != reference.rows() || fitted.cols() != reference.cols()) {
    throw Error(Errc::kDimensionMismatch, "cluster sets differ in shape");
  }
  const std::size_t k = fitted.rows();
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      pairs.emplace_back(SquaredDistance(fitted.row(a), reference.row(b)), a, b);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  constexpr auto kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> mapping(k, kUnset);
  std::vector<bool> taken(k, false);
  for (const auto& [d, a, b] : pairs) {
    if (mapping[a] != kUnset || taken[b]) continue;
    mapping[a] = b;
    taken[b] = true;
  }
  // Greedy over a complete bipartite list always yields a bijection.
  if (std::count(taken.begin(), taken.end(), true) != static_cast<long>(k)) {
    throw std::logic_error("cluster matching is not one-to-one");
  }
  return mapping;
}

// Re-clusters the personal day with the reference k, then maps each new
// cluster onto the nearest unused reference cluster.
inline std::vector<std::size_t> ReclusteredCounts(const ClusterModel& model,
                                                  const Dataset& personal, std::uint64_t seed,
                                                  const KMeansOptions& options = {}) {
  if (personal.empty()) throw Error(Errc::kEmptyDataset, "personal dataset is empty");
  const Matrix x = ApplyNormalizer(model.normalization, personal);
  const ClusterModel own = KMeansFit(x, model.k, seed, options, model.normalization);
  const auto mapping = MatchClusters(own.centroids, model.centroids);
  std::vector<std::size_t> counts(model.k, 0);
  for (auto label : Assign(own, x)) ++counts[mapping[label]];
  return counts;
}

inline double TotalExposure(std::span<const std::size_t> counts, const PotencyTable& table) {
  if (counts.size() != table.clusters.size()) {
    throw Error(Errc::kLengthMismatch, "one count per cluster required");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    total += static_cast<double>(counts[i]) * table.clusters[i].potency;
  }
  return total;
}

// E_j = W_j * sum of pollutant j over the readings, per tracked pollutant.
inline std::vector<double> PollutantExposure(const Dataset& personal, const WeightFactors& weights,
                                             const std::vector<Pollutant>& tracked) {
  if (personal.empty()) throw Error(Errc::kEmptyDataset, "personal dataset is empty");
  std::vector<double> out;
  for (Pollutant p : tracked) {
    double sum = 0.0;
    for (const auto& r : personal.readings) sum += r.pollutants[p];
    out.push_back(weights[p] * sum);
  }
  return out;
}

// Divides each column of raw[person][pollutant] by its minimum over people.
inline std::vector<std::vector<double>> NormalizeCohort(
    const std::vector<std::vector<double>>& raw) {
  if (raw.empty()) throw Error(Errc::kEmptyInput, "cohort is empty");
  const std::size_t cols = raw.front().size();
  std::vector<double> minimum(cols, std::numeric_limits<double>::infinity());
  for (const auto& person : raw) {
    if (person.size() != cols) throw Error(Errc::kLengthMismatch, "ragged cohort table");
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(person[j] > 0.0) || !std::isfinite(person[j])) {
        throw Error(Errc::kNonPositiveRaw, "raw exposures must be positive");
      }
      minimum[j] = std::min(minimum[j], person[j]);
    }
  }
  std::vector<std::vector<double>> out = raw;
  for (auto& person : out) {
    for (std::size_t j = 0; j < cols; ++j) person[j] /= minimum[j];
  }
  return out;
}

struct ExposureReport {
  std::string person_id;
  std::string date;
  std::vector<std::size_t> counts;
  std::vector<double> potencies;
  double total_exposure = 0.0;
  std::vector<Pollutant> tracked;
  std::vector<double> raw_exposure;
  std::vector<double> normalized_exposure;
};

struct PersonDay {
  std::string person_id;
  Dataset readings;  // preprocessed
};

struct CohortOptions {
  bool recluster = false;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
};

inline std::vector<ExposureReport> BuildCohortReports(const ClusterModel& model,
                                                      const PotencyTable& table,
                                                      const std::vector<PersonDay>& cohort,
                                                      const CohortOptions& options = {}) {
  if (cohort.empty()) throw Error(Errc::kEmptyInput, "cohort is empty");
  std::vector<ExposureReport> reports;
  std::vector<std::vector<double>> raw;
  for (const auto& person : cohort) {
    ExposureReport r;
    r.person_id = person.person_id;
    if (person.readings.empty()) {
      throw Error(Errc::kEmptyDataset, "no readings for person '" + person.person_id + "'");
    }
    r.date = FormatDate(person.readings.readings.front().timestamp);
    r.counts =
        options.recluster
            ? ReclusteredCounts(model, person.readings,
                                DeriveSeed(options.seed, "exposure/recluster/" + r.person_id),
                                options.kmeans)
            : PersonalClusterCounts(model, person.readings);
    r.potencies = table.Potencies();
    r.total_exposure = TotalExposure(r.counts, table);
    r.tracked = table.tracked;
    r.raw_exposure = PollutantExposure(person.readings, table.weights, table.tracked);
    raw.push_back(r.raw_exposure);
    reports.push_back(std::move(r));
  }
  const auto normalized = NormalizeCohort(raw);
  for (std::size_t i = 0; i < reports.size(); ++i) reports[i].normalized_exposure = normalized[i];
  return reports;
}

inline void to_json(nlohmann::json& j, const ExposureReport& r) {
  nlohmann::json raw, normalized, reported;
  for (std::size_t i = 0; i < r.tracked.size(); ++i) {
    const std::string key(PollutantKey(r.tracked[i]));
    raw[key] = r.raw_exposure[i];
    normalized[key] = r.normalized_exposure[i];
    reported[key] = RoundHalfUp(r.normalized_exposure[i], 2);
  }
  j = nlohmann::json{{"person_id", r.person_id},
                     {"date", r.date},
                     {"counts", r.counts},
                     {"potencies", r.potencies},
                     {"total_exposure", r.total_exposure},
                     {"raw_exposure", std::move(raw)},
                     {"normalized_exposure", std::move(normalized)},
                     {"normalized_exposure_2dp", std::move(reported)}};
}

}  // namespace aerolens

#endif  // AEROLENS_EXPOSURE_HPP_
