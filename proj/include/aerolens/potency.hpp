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

#ifndef AEROLENS_POTENCY_HPP_
#define AEROLENS_POTENCY_HPP_

// Cluster potency: each cluster's dominant weighted pollutant mean, scaled so
// the cluster with the smallest dominant mean scores `beta`.
//
//   Sum_ij  = sum_k W_j * P_jk     over readings k of cluster i
//   Mean_ij = Sum_ij / n_i
//   M_i     = max_j Mean_ij        (the dominant pollutant)
//   potency_i = round_half_up(beta * M_i / min_i M_i, 1 decimal)
//
// With beta = 2, dominant means of 1979.392, 784.29 and 1404.75 score
// 5.0, 2.0 and 3.6.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "aerolens/clustering.hpp"
#include "aerolens/error.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/types.hpp"
#include "aerolens/weights.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kPotencySchemaVersion = 1;

inline const std::vector<Pollutant>& DefaultTrackedPollutants() {
  static const std::vector<Pollutant> kTracked = {Pollutant::kNo2, Pollutant::kVoc,
                                                  Pollutant::kPm10};
  return kTracked;
}

inline double RoundHalfUp(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 0.5) / scale;
}

struct PollutantStat {
  Pollutant pollutant = Pollutant::kNo2;
  double sum = 0.0;   // weighted
  double mean = 0.0;  // weighted
};

struct ClusterPotency {
  std::size_t cluster = 0;
  std::size_t instance_count = 0;
  std::vector<PollutantStat> stats;  // tracked pollutant order
  Pollutant dominant = Pollutant::kNo2;
  double dominant_mean = 0.0;
  double raw_potency = 0.0;  // before rounding
  double potency = 0.0;
  std::size_t rank = 0;  // 1 = most potent
};

struct PotencyTable {
  double beta = 2.0;
  std::vector<Pollutant> tracked;
  WeightFactors weights;
  std::vector<ClusterPotency> clusters;  // indexed by cluster id
  std::vector<std::size_t> ranking;      // cluster ids, most potent first

  std::vector<double> Potencies() const {
    std::vector<double> out;
    for (const auto& c : clusters) out.push_back(c.potency);
    return out;
  }
};

// Core computation over raw concentrations and precomputed cluster labels.
inline PotencyTable ComputePotency(const Matrix& raw, std::span<const std::size_t> labels,
                                   std::size_t k, const WeightFactors& weights, double beta,
                                   const std::vector<Pollutant>& tracked) {
  if (tracked.empty()) throw Error(Errc::kNoTrackedPollutants, "no tracked pollutants");
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::kInvalidArgument, "beta must be positive");
  }
  if (labels.size() != raw.rows()) throw Error(Errc::kLengthMismatch, "one label per row");
  if (raw.cols() != kPollutantCount) {
    throw Error(Errc::kDimensionMismatch, "potency needs 5 pollutant columns");
  }
  PotencyTable table;
  table.beta = beta;
  table.tracked = tracked;
  table.weights = weights;
  table.clusters.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    table.clusters[i].cluster = i;
    for (Pollutant p : tracked) table.clusters[i].stats.push_back({p, 0.0, 0.0});
  }
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    if (labels[r] >= k) throw Error(Errc::kInvalidArgument, "cluster label out of range");
    auto& c = table.clusters[labels[r]];
    ++c.instance_count;
    for (auto& s : c.stats) s.sum += weights[s.pollutant] * raw(r, Index(s.pollutant));
  }
  double min_dominant = std::numeric_limits<double>::infinity();
  for (auto& c : table.clusters) {
    if (c.instance_count == 0) {
      throw Error(Errc::kEmptyCluster, "cluster " + std::to_string(c.cluster) + " is empty",
                  std::nullopt, c.cluster);
    }
    std::size_t best = 0;
    for (std::size_t j = 0; j < c.stats.size(); ++j) {
      c.stats[j].mean = c.stats[j].sum / static_cast<double>(c.instance_count);
      if (c.stats[j].mean > c.stats[best].mean) best = j;
    }
    c.dominant = c.stats[best].pollutant;
    c.dominant_mean = c.stats[best].mean;
    min_dominant = std::min(min_dominant, c.dominant_mean);
  }
  for (auto& c : table.clusters) {
    // An all-zero minimum makes the ratio meaningless; every cluster then
    // scores beta when its own mean is zero too.
    c.raw_potency = min_dominant > 0.0       ? beta * c.dominant_mean / min_dominant
                    : c.dominant_mean == 0.0 ? beta
                                             : std::numeric_limits<double>::infinity();
    c.potency = RoundHalfUp(c.raw_potency, 1);
  }
  table.ranking.resize(k);
  std::iota(table.ranking.begin(), table.ranking.end(), 0);
  std::stable_sort(table.ranking.begin(), table.ranking.end(), [&](auto a, auto b) {
    return table.clusters[a].raw_potency > table.clusters[b].raw_potency;
  });
  for (std::size_t r = 0; r < k; ++r) table.clusters[table.ranking[r]].rank = r + 1;
  return table;
}

// Assigns every reference reading to its nearest centroid, then ranks.
inline PotencyTable ClusterPotencyTable(
    const ClusterModel& model, const Dataset& reference, const WeightFactors& weights,
    double beta = 2.0, const std::vector<Pollutant>& tracked = DefaultTrackedPollutants()) {
  if (reference.empty()) throw Error(Errc::kEmptyDataset, "reference dataset is empty");
  const Matrix raw = ToMatrix(reference);
  const auto labels = Assign(model, ApplyNormalizer(model.normalization, raw));
  return ComputePotency(raw, labels, model.k, weights, beta, tracked);
}

inline void to_json(nlohmann::json& j, const PotencyTable& t) {
  nlohmann::json rows = nlohmann::json::array();
  nlohmann::json clusters = nlohmann::json::array();
  for (const auto& c : t.clusters) {
    for (const auto& s : c.stats) {
      rows.push_back({{"cluster", c.cluster},
                      {"pollutant", PollutantKey(s.pollutant)},
                      {"sum", s.sum},
                      {"mean", s.mean},
                      {"potency", c.potency}});
    }
    clusters.push_back({{"cluster", c.cluster},
                        {"instance_count", c.instance_count},
                        {"dominant_pollutant", PollutantKey(c.dominant)},
                        {"dominant_mean", c.dominant_mean},
                        {"raw_potency", c.raw_potency},
                        {"potency", c.potency},
                        {"rank", c.rank}});
  }
  std::vector<std::string> tracked;
  for (Pollutant p : t.tracked) tracked.emplace_back(PollutantKey(p));
  j = nlohmann::json{{"schema_version", kPotencySchemaVersion},
                     {"beta", t.beta},
                     {"tracked_pollutants", tracked},
                     {"weights", t.weights},
                     {"rows", std::move(rows)},
                     {"clusters", std::move(clusters)},
                     {"ranking", t.ranking}};
}

inline PotencyTable PotencyTableFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kPotencySchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "potency schema_version " + std::to_string(version));
    }
    PotencyTable t;
    t.beta = j.at("beta").get<double>();
    for (const auto& key : j.at("tracked_pollutants")) {
      const auto p = ParsePollutant(key.get<std::string>());
      if (!p) throw Error(Errc::kCorruptDocument, "unknown pollutant in potency table");
      t.tracked.push_back(*p);
    }
    t.weights = WeightFactorsFromJson(j.at("weights"));
    for (const auto& jc : j.at("clusters")) {
      ClusterPotency c;
      c.cluster = jc.at("cluster").get<std::size_t>();
      c.instance_count = jc.at("instance_count").get<std::size_t>();
      const auto dom = ParsePollutant(jc.at("dominant_pollutant").get<std::string>());
      if (!dom) throw Error(Errc::kCorruptDocument, "unknown dominant pollutant");
      c.dominant = *dom;
      c.dominant_mean = jc.at("dominant_mean").get<double>();
      c.raw_potency = jc.at("raw_potency").get<double>();
      c.potency = jc.at("potency").get<double>();
      c.rank = jc.at("rank").get<std::size_t>();
      if (c.cluster != t.clusters.size()) {
        throw Error(Errc::kCorruptDocument, "clusters out of order in potency table");
      }
      for (Pollutant p : t.tracked) c.stats.push_back({p, 0.0, 0.0});
      t.clusters.push_back(std::move(c));
    }
    for (const auto& row : j.at("rows")) {
      const auto cluster = row.at("cluster").get<std::size_t>();
      const auto p = ParsePollutant(row.at("pollutant").get<std::string>());
      if (cluster >= t.clusters.size() || !p) {
        throw Error(Errc::kCorruptDocument, "bad potency row");
      }
      for (auto& s : t.clusters[cluster].stats) {
        if (s.pollutant == *p) {
          s.sum = row.at("sum").get<double>();
          s.mean = row.at("mean").get<double>();
        }
      }
    }
    t.ranking = j.at("ranking").get<std::vector<std::size_t>>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
}

}  // namespace aerolens

#endif  // AEROLENS_POTENCY_HPP_
