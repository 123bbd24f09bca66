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

#ifndef AEROLENS_WEIGHTS_HPP_
#define AEROLENS_WEIGHTS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "aerolens/error.hpp"
#include "aerolens/types.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kWeightFactorsSchemaVersion = 1;
inline constexpr double kWeightFloor = 0.01;

// Per-pollutant weights in (0, 1], the largest exactly 1.
struct WeightFactors {
  std::array<double, kPollutantCount> weights{1, 1, 1, 1, 1};
  std::string provenance;

  double operator[](Pollutant p) const { return weights[Index(p)]; }
};

// W_j = importance_j / max importance. Zero importances get the floor 0.01,
// lowered to half the smallest positive weight when that is below 0.01 so
// the floor never outranks a feature with real importance.
inline WeightFactors DeriveWeightFactors(std::span<const double> importances,
                                         std::string provenance = "mean_abs_shap") {
  if (importances.size() != kPollutantCount) {
    throw Error(Errc::kLengthMismatch, "one importance per pollutant required");
  }
  double top = 0.0;
  for (double v : importances) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(Errc::kInvalidImportance, "importances must be finite and non-negative");
    }
    top = std::max(top, v);
  }
  if (top == 0.0) throw Error(Errc::kAllZeroImportances, "every importance is zero");
  WeightFactors w;
  w.provenance = std::move(provenance);
  double smallest_positive = 1.0;
  for (std::size_t j = 0; j < kPollutantCount; ++j) {
    w.weights[j] = importances[j] / top;
    if (w.weights[j] > 0.0) smallest_positive = std::min(smallest_positive, w.weights[j]);
  }
  const double floor = std::min(kWeightFloor, smallest_positive / 2.0);
  for (double& v : w.weights) {
    if (v == 0.0) v = floor;
  }
  return w;
}

inline void to_json(nlohmann::json& j, const WeightFactors& w) {
  nlohmann::json weights;
  for (Pollutant p : kAllPollutants) weights[std::string(PollutantKey(p))] = w[p];
  j = nlohmann::json{{"schema_version", kWeightFactorsSchemaVersion},
                     {"weights", std::move(weights)},
                     {"provenance", w.provenance}};
}

inline WeightFactors WeightFactorsFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kWeightFactorsSchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "weights schema_version " + std::to_string(version));
    }
    WeightFactors w;
    for (Pollutant p : kAllPollutants) {
      const double v = j.at("weights").at(std::string(PollutantKey(p))).get<double>();
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw Error(Errc::kCorruptDocument, "weights must be positive");
      }
      w.weights[Index(p)] = v;
    }
    w.provenance = j.value("provenance", std::string());
    return w;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
}

}  // namespace aerolens

#endif  // AEROLENS_WEIGHTS_HPP_
