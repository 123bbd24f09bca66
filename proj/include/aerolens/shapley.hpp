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

#ifndef AEROLENS_SHAPLEY_HPP_
#define AEROLENS_SHAPLEY_HPP_

// Exact Shapley attributions by enumerating every feature coalition.
//
// The value of a coalition S is the interventional expectation
//   v(S) = mean_b f(x_S, b_~S)
// over a background matrix: features in S come from the explained instance,
// the rest from each background row. With five pollutants that is 32
// coalitions per background row, cheap enough to skip sampling entirely.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/tree.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kAttributionSchemaVersion = 1;

enum class AttributionMethod { kExactShapley, kLocalSurrogate };

inline std::string_view MethodKey(AttributionMethod m) {
  return m == AttributionMethod::kExactShapley ? "exact_shapley" : "local_surrogate";
}

struct Attribution {
  std::vector<double> values;  // one per feature, feature order
  double base_value = 0.0;     // v(empty) for Shapley, local intercept for LIME
  double model_output = 0.0;   // f(instance)
  std::string target_class;
  AttributionMethod method = AttributionMethod::kExactShapley;
};

namespace detail {

inline constexpr std::size_t kMaxShapleyFeatures = 20;

// w(s) = s! (n - s - 1)! / n!
inline std::vector<double> ShapleyWeights(std::size_t n) {
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);
  std::vector<double> w(n);
  for (std::size_t s = 0; s < n; ++s) w[s] = factorial[s] * factorial[n - s - 1] / factorial[n];
  return w;
}

}  // namespace detail

// Coalition values v(S) for every S (bit j set = feature j from the
// instance), one vector of model outputs per coalition. `f` maps a feature
// row to a vector of `n_outputs` values.
template <class VectorFn>
std::vector<std::vector<double>> CoalitionValues(VectorFn&& f, std::span<const double> instance,
                                                 const Matrix& background, std::size_t n_outputs) {
  if (background.empty()) throw Error(Errc::kEmptyBackground, "background matrix is empty");
  const std::size_t n = instance.size();
  if (background.cols() != n) {
    throw Error(Errc::kDimensionMismatch, "background width differs from instance width");
  }
  if (n > detail::kMaxShapleyFeatures) {
    throw Error(Errc::kInvalidArgument, "too many features for exact enumeration");
  }
  const std::size_t n_masks = std::size_t{1} << n;
  std::vector<std::vector<double>> values(n_masks, std::vector<double>(n_outputs, 0.0));
  std::vector<double> z(n);
  for (std::size_t b = 0; b < background.rows(); ++b) {
    const auto bg = background.row(b);
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
      for (std::size_t j = 0; j < n; ++j) z[j] = (mask >> j) & 1U ? instance[j] : bg[j];
      const std::vector<double> out = f(std::span<const double>(z));
      for (std::size_t o = 0; o < n_outputs; ++o) values[mask][o] += out[o];
    }
  }
  const auto rows = static_cast<double>(background.rows());
  for (auto& v : values) {
    for (double& x : v) x /= rows;
  }
  return values;
}

// phi_j for output `o` from precomputed coalition values.
inline std::vector<double> ShapleyFromCoalitions(const std::vector<std::vector<double>>& values,
                                                 std::size_t n_features, std::size_t o) {
  const auto weights = detail::ShapleyWeights(n_features);
  std::vector<double> phi(n_features, 0.0);
  for (std::size_t mask = 0; mask < values.size(); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcountll(mask));
    for (std::size_t j = 0; j < n_features; ++j) {
      if ((mask >> j) & 1U) continue;
      phi[j] += weights[size] * (values[mask | (std::size_t{1} << j)][o] - values[mask][o]);
    }
  }
  return phi;
}

// Scalar model f: row -> double.
template <class ScalarFn>
Attribution ShapExact(ScalarFn&& f, std::span<const double> instance, const Matrix& background) {
  auto wrapped = [&](std::span<const double> z) { return std::vector<double>{f(z)}; };
  const auto values = CoalitionValues(wrapped, instance, background, 1);
  Attribution a;
  a.method = AttributionMethod::kExactShapley;
  a.values = ShapleyFromCoalitions(values, instance.size(), 0);
  a.base_value = values.front()[0];
  a.model_output = values.back()[0];
  return a;
}

// Attribution of the probability of `target_class` (the predicted class when
// not given).
inline Attribution ShapExact(const ClassifierModel& model, std::span<const double> instance,
                             const Matrix& background,
                             std::optional<std::size_t> target_class = std::nullopt) {
  const std::size_t target = target_class.value_or(ArgMax(PredictProbaRow(model, instance)));
  if (target >= model.class_list.size()) {
    throw Error(Errc::kInvalidArgument, "target class out of range");
  }
  auto a = ShapExact([&](std::span<const double> z) { return PredictProbaRow(model, z)[target]; },
                     instance, background);
  a.target_class = model.class_list[target];
  return a;
}

// Mean |phi_j| over sample rows and over every class probability.
inline std::vector<double> MeanAbsShap(const ClassifierModel& model, const Matrix& sample,
                                       const Matrix& background) {
  if (sample.empty()) throw Error(Errc::kEmptyInput, "empty sample");
  const std::size_t n = sample.cols();
  const std::size_t k = model.class_list.size();
  std::vector<double> importance(n, 0.0);
  auto f = [&](std::span<const double> z) { return PredictProbaRow(model, z); };
  for (std::size_t r = 0; r < sample.rows(); ++r) {
    const auto values = CoalitionValues(f, sample.row(r), background, k);
    for (std::size_t c = 0; c < k; ++c) {
      const auto phi = ShapleyFromCoalitions(values, n, c);
      for (std::size_t j = 0; j < n; ++j) importance[j] += std::abs(phi[j]);
    }
  }
  for (double& v : importance) v /= static_cast<double>(sample.rows() * k);
  return importance;
}

inline void to_json(nlohmann::json& j, const Attribution& a) {
  j = nlohmann::json{{"schema_version", kAttributionSchemaVersion},
                     {"method", MethodKey(a.method)},
                     {"target_class", a.target_class},
                     {"base_value", a.base_value},
                     {"model_output", a.model_output},
                     {"values", a.values}};
}

}  // namespace aerolens

#endif  // AEROLENS_SHAPLEY_HPP_
