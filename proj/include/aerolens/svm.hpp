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

#ifndef AEROLENS_SVM_HPP_
#define AEROLENS_SVM_HPP_

// One-vs-rest linear SVM trained by Pegasos-style stochastic subgradient
// descent on the L2-regularized hinge loss. The bias is treated as the
// weight of a constant input and shrinks with the rest.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/random.hpp"

namespace aerolens {

struct SvmParams {
  double lambda = 1e-3;
  std::size_t epochs = 50;
};

struct LinearSvm {
  std::vector<std::vector<double>> weights;  // [class][feature]
  std::vector<double> bias;

  std::vector<double> Margins(std::span<const double> x) const {
    std::vector<double> out(bias);
    for (std::size_t c = 0; c < weights.size(); ++c) {
      for (std::size_t f = 0; f < x.size(); ++f) out[c] += weights[c][f] * x[f];
    }
    return out;
  }

  // Softmax over margins. Not calibrated; used where a probability is needed.
  std::vector<double> SoftmaxMargins(std::span<const double> x) const {
    auto m = Margins(x);
    double top = m[0];
    for (double v : m) top = std::max(top, v);
    double total = 0.0;
    for (double& v : m) {
      v = std::exp(v - top);
      total += v;
    }
    for (double& v : m) v /= total;
    return m;
  }
};

inline LinearSvm TrainLinearSvm(const Matrix& x, std::span<const int> y, std::size_t n_classes,
                                const SvmParams& params, std::uint64_t seed) {
  if (x.empty() || y.empty()) throw Error(Errc::kEmptyInput, "no training rows");
  if (x.rows() != y.size()) throw Error(Errc::kLengthMismatch, "one label per row required");
  if (!(params.lambda > 0.0) || params.epochs == 0) {
    throw Error(Errc::kInvalidArgument, "lambda must be > 0 and epochs >= 1");
  }
  std::vector<bool> seen(n_classes, false);
  for (int label : y) {
    if (label < 0 || static_cast<std::size_t>(label) >= n_classes) {
      throw Error(Errc::kInvalidArgument, "label index out of range");
    }
    seen[static_cast<std::size_t>(label)] = true;
  }
  if (n_classes < 2 || std::count(seen.begin(), seen.end(), true) < 2) {
    throw Error(Errc::kSingleClass, "a linear SVM needs at least two classes");
  }

  const std::size_t d = x.cols();
  LinearSvm svm;
  svm.weights.assign(n_classes, std::vector<double>(d, 0.0));
  svm.bias.assign(n_classes, 0.0);
  Rng rng(DeriveSeed(seed, "svm/shuffle"));
  std::vector<std::size_t> order(x.rows());
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.Shuffle(order);
    for (auto r : order) {
      ++step;
      const double eta = 1.0 / (params.lambda * static_cast<double>(step));
      const auto row = x.row(r);
      for (std::size_t c = 0; c < n_classes; ++c) {
        const double target = y[r] == static_cast<int>(c) ? 1.0 : -1.0;
        auto& w = svm.weights[c];
        double margin = svm.bias[c];
        for (std::size_t f = 0; f < d; ++f) margin += w[f] * row[f];
        const double shrink = 1.0 - eta * params.lambda;
        for (double& v : w) v *= shrink;
        svm.bias[c] *= shrink;
        if (target * margin < 1.0) {
          for (std::size_t f = 0; f < d; ++f) w[f] += eta * target * row[f];
          svm.bias[c] += eta * target;
        }
      }
    }
  }
  return svm;
}

}  // namespace aerolens

#endif  // AEROLENS_SVM_HPP_
