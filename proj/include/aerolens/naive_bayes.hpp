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

#ifndef AEROLENS_NAIVE_BAYES_HPP_
#define AEROLENS_NAIVE_BAYES_HPP_

#include <cmath>
#include <numbers>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"

namespace aerolens {

inline constexpr double kVarianceFloor = 1e-9;

struct GaussianNaiveBayes {
  std::vector<std::vector<double>> means;      // [class][feature]
  std::vector<std::vector<double>> variances;  // [class][feature], floored
  std::vector<double> priors;

  std::vector<double> LogJoint(std::span<const double> x) const {
    std::vector<double> out(priors.size());
    for (std::size_t c = 0; c < priors.size(); ++c) {
      double s = std::log(priors[c]);
      for (std::size_t f = 0; f < x.size(); ++f) {
        const double var = variances[c][f];
        const double d = x[f] - means[c][f];
        s += -0.5 * std::log(2.0 * std::numbers::pi * var) - d * d / (2.0 * var);
      }
      out[c] = s;
    }
    return out;
  }

  std::vector<double> Posterior(std::span<const double> x) const {
    auto lj = LogJoint(x);
    double top = lj[0];
    for (double v : lj) top = std::max(top, v);
    double total = 0.0;
    for (double& v : lj) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : lj) v /= total;
    return lj;
  }
};

inline GaussianNaiveBayes TrainGaussianNaiveBayes(const Matrix& x, std::span<const int> y,
                                                  std::size_t n_classes) {
  if (x.empty() || y.empty()) throw Error(Errc::kEmptyInput, "no training rows");
  if (x.rows() != y.size()) throw Error(Errc::kLengthMismatch, "one label per row required");
  const std::size_t d = x.cols();
  GaussianNaiveBayes nb;
  nb.means.assign(n_classes, std::vector<double>(d, 0.0));
  nb.variances.assign(n_classes, std::vector<double>(d, 0.0));
  std::vector<double> counts(n_classes, 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    if (c >= n_classes) throw Error(Errc::kInvalidArgument, "label index out of range");
    counts[c] += 1.0;
    for (std::size_t f = 0; f < d; ++f) nb.means[c][f] += x(r, f);
  }
  for (std::size_t c = 0; c < n_classes; ++c) {
    if (counts[c] == 0.0) {
      throw Error(Errc::kEmptyInput, "class " + std::to_string(c) + " has no training rows");
    }
    for (double& m : nb.means[c]) m /= counts[c];
  }
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto c = static_cast<std::size_t>(y[r]);
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = x(r, f) - nb.means[c][f];
      nb.variances[c][f] += diff * diff;
    }
  }
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (double& v : nb.variances[c]) v = v / counts[c] + kVarianceFloor;
    nb.priors.push_back(counts[c] / n);
  }
  return nb;
}

}  // namespace aerolens

#endif  // AEROLENS_NAIVE_BAYES_HPP_
