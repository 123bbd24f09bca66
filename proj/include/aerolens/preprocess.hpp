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

#ifndef AEROLENS_PREPROCESS_HPP_
#define AEROLENS_PREPROCESS_HPP_

#include <array>
#include <set>
#include <string>
#include <utility>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/types.hpp"
#include "json.hpp"

namespace aerolens {

struct PreprocessReport {
  std::size_t input_count = 0;
  std::size_t dropped_null = 0;
  std::size_t dropped_negative = 0;
  std::size_t dropped_duplicate = 0;
  std::size_t output_count = 0;

  bool Reconciles() const {
    return output_count + dropped_null + dropped_negative + dropped_duplicate == input_count;
  }
};

// Drops rows with a null pollutant, then rows with a negative one, then
// repeated (timestamp, person_id) pairs keeping the first occurrence. A row
// with both a null and a negative value counts as null.
inline std::pair<Dataset, PreprocessReport> Preprocess(const Dataset& input) {
  PreprocessReport report;
  report.input_count = input.size();
  Dataset out;
  out.source_tag = input.source_tag;
  out.readings.reserve(input.size());
  std::set<std::pair<Timestamp, std::string>> seen;
  for (const auto& r : input.readings) {
    if (r.pollutants.HasNull()) {
      ++report.dropped_null;
      continue;
    }
    if (r.pollutants.HasNegative()) {
      ++report.dropped_negative;
      continue;
    }
    // person_id absent and person_id "" are distinct from any real id but
    // equal to each other, which matches how the CSV writes them.
    if (!seen.emplace(r.timestamp, r.person_id.value_or(std::string())).second) {
      ++report.dropped_duplicate;
      continue;
    }
    out.readings.push_back(r);
  }
  report.output_count = out.size();
  return {std::move(out), report};
}

struct NormalizationParams {
  std::array<double, kPollutantCount> min{};
  std::array<double, kPollutantCount> max{};

  bool Degenerate(std::size_t feature) const { return max[feature] == min[feature]; }

  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

inline NormalizationParams FitNormalizer(const Matrix& raw) {
  if (raw.empty()) throw Error(Errc::kEmptyDataset, "cannot fit a normalizer on zero rows");
  if (raw.cols() != kPollutantCount) {
    throw Error(Errc::kDimensionMismatch, "normalizer expects 5 pollutant columns");
  }
  NormalizationParams params;
  for (std::size_t c = 0; c < kPollutantCount; ++c) {
    params.min[c] = params.max[c] = raw(0, c);
  }
  for (std::size_t r = 1; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < kPollutantCount; ++c) {
      params.min[c] = std::min(params.min[c], raw(r, c));
      params.max[c] = std::max(params.max[c], raw(r, c));
    }
  }
  return params;
}

inline NormalizationParams FitNormalizer(const Dataset& dataset) {
  if (dataset.empty()) throw Error(Errc::kEmptyDataset, "cannot fit a normalizer on zero rows");
  return FitNormalizer(ToMatrix(dataset));
}

// (v - min) / (max - min), unclamped; degenerate features map to 0.
inline double NormalizeValue(const NormalizationParams& params, std::size_t feature, double v) {
  if (params.Degenerate(feature)) return 0.0;
  return (v - params.min[feature]) / (params.max[feature] - params.min[feature]);
}

inline double DenormalizeValue(const NormalizationParams& params, std::size_t feature, double v) {
  return v * (params.max[feature] - params.min[feature]) + params.min[feature];
}

inline Matrix ApplyNormalizer(const NormalizationParams& params, const Matrix& raw) {
  if (raw.cols() != kPollutantCount) {
    throw Error(Errc::kDimensionMismatch, "normalizer expects 5 pollutant columns");
  }
  Matrix out(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < kPollutantCount; ++c) {
      out(r, c) = NormalizeValue(params, c, raw(r, c));
    }
  }
  return out;
}

inline Matrix ApplyNormalizer(const NormalizationParams& params, const Dataset& dataset) {
  return ApplyNormalizer(params, ToMatrix(dataset));
}

inline void to_json(nlohmann::json& j, const NormalizationParams& p) {
  j = nlohmann::json{{"min", p.min}, {"max", p.max}};
}

inline void from_json(const nlohmann::json& j, NormalizationParams& p) {
  j.at("min").get_to(p.min);
  j.at("max").get_to(p.max);
  for (std::size_t c = 0; c < kPollutantCount; ++c) {
    if (!(p.max[c] >= p.min[c])) {
      throw Error(Errc::kCorruptDocument, "normalization max below min");
    }
  }
}

}  // namespace aerolens

#endif  // AEROLENS_PREPROCESS_HPP_
