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

#ifndef AEROLENS_LIME_HPP_
#define AEROLENS_LIME_HPP_

// Local linear surrogates around one instance.
//
// Perturbations z = x + N(0, sigma^2 I) are weighted by the Gaussian kernel
// exp(-|z - x|^2 / width^2). A ridge-damped weighted least-squares fit of
// the model output on the design [1, z - x] gives an intercept (the local
// prediction at x) and one slope per feature; the slopes are the reported
// explanation.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/random.hpp"
#include "aerolens/shapley.hpp"
#include "aerolens/types.hpp"

namespace aerolens {

struct LimeOptions {
  std::size_t n_samples = 1000;
  double sigma = 0.3;
  double kernel_width = 0.75 * std::sqrt(static_cast<double>(kPollutantCount));
  double ridge = 1e-6;
  std::uint64_t seed = 0;
};

inline Matrix LimePerturbations(std::span<const double> instance, std::size_t n_samples,
                                double sigma, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, "lime/perturb"));
  Matrix z(n_samples, instance.size());
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t j = 0; j < instance.size(); ++j) z(i, j) = rng.Normal(instance[j], sigma);
  }
  return z;
}

struct SurrogateFit {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

namespace detail {

// Solves A x = b for symmetric positive definite A (row-major, n x n).
inline std::vector<double> CholeskySolve(std::vector<double> a, std::vector<double> b,
                                         std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) {
      throw Error(Errc::kDegeneratePerturbations, "surrogate normal equations are singular");
    }
    const double l = std::sqrt(diag);
    a[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / l;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i * n + k] * b[k];
    b[i] /= a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a[k * n + i] * b[k];
    b[i] /= a[i * n + i];
  }
  return b;
}

}  // namespace detail

// Minimizes sum_i w_i (y_i - beta . [1, z_i - x])^2 + ridge |beta|^2.
inline SurrogateFit FitWeightedSurrogate(const Matrix& perturbations,
                                         std::span<const double> targets,
                                         std::span<const double> instance, double kernel_width,
                                         double ridge) {
  const std::size_t n = perturbations.rows();
  const std::size_t d = instance.size();
  if (targets.size() != n) throw Error(Errc::kLengthMismatch, "one target per perturbation");
  if (perturbations.cols() != d) {
    throw Error(Errc::kDimensionMismatch, "perturbation width differs from instance width");
  }
  if (!(kernel_width > 0.0)) throw Error(Errc::kInvalidArgument, "kernel width must be > 0");
  const std::size_t p = d + 1;
  std::vector<double> ata(p * p, 0.0), atb(p, 0.0), row(p);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto z = perturbations.row(i);
    row[0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) row[j + 1] = z[j] - instance[j];
    const double w = std::exp(-SquaredDistance(z, instance) / (kernel_width * kernel_width));
    weight_sum += w;
    for (std::size_t a = 0; a < p; ++a) {
      atb[a] += w * row[a] * targets[i];
      for (std::size_t b = 0; b < p; ++b) ata[a * p + b] += w * row[a] * row[b];
    }
  }
  if (!(weight_sum > 1e-300)) {
    throw Error(Errc::kDegeneratePerturbations, "every perturbation has zero kernel weight");
  }
  for (std::size_t a = 0; a < p; ++a) ata[a * p + a] += ridge;
  const auto beta = detail::CholeskySolve(std::move(ata), std::move(atb), p);
  SurrogateFit fit;
  fit.intercept = beta[0];
  fit.coefficients.assign(beta.begin() + 1, beta.end());
  return fit;
}

template <class ScalarFn>
Attribution LimeExplain(ScalarFn&& f, std::span<const double> instance,
                        const LimeOptions& options) {
  if (options.n_samples < 50) throw Error(Errc::kInvalidArgument, "n_samples must be >= 50");
  if (!(options.sigma > 0.0)) throw Error(Errc::kInvalidArgument, "sigma must be > 0");
  const Matrix z = LimePerturbations(instance, options.n_samples, options.sigma, options.seed);
  std::vector<double> y(z.rows());
  for (std::size_t i = 0; i < z.rows(); ++i) y[i] = f(z.row(i));
  const auto fit = FitWeightedSurrogate(z, y, instance, options.kernel_width, options.ridge);
  Attribution a;
  a.method = AttributionMethod::kLocalSurrogate;
  a.values = fit.coefficients;
  a.base_value = fit.intercept;
  a.model_output = f(instance);
  return a;
}

inline Attribution LimeExplain(const ClassifierModel& model, std::span<const double> instance,
                               const LimeOptions& options,
                               std::optional<std::size_t> target_class = std::nullopt) {
  const std::size_t target = target_class.value_or(ArgMax(PredictProbaRow(model, instance)));
  if (target >= model.class_list.size()) {
    throw Error(Errc::kInvalidArgument, "target class out of range");
  }
  auto a = LimeExplain([&](std::span<const double> z) { return PredictProbaRow(model, z)[target]; },
                       instance, options);
  a.target_class = model.class_list[target];
  return a;
}

}  // namespace aerolens

#endif  // AEROLENS_LIME_HPP_
