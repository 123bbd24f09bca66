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

#ifndef AEROLENS_METRICS_HPP_
#define AEROLENS_METRICS_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kEvalReportSchemaVersion = 1;

// confusion[truth][predicted]
using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct EvalReport {
  std::vector<std::string> classes;
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double kappa = 0.0;
  double rmse = 0.0;
  double mcc = 0.0;
  double f1_macro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
};

inline ConfusionMatrix BuildConfusion(std::size_t n_classes, std::span<const int> truth,
                                      std::span<const int> predicted) {
  if (truth.size() != predicted.size()) {
    throw Error(Errc::kLengthMismatch, "truth and prediction lengths differ");
  }
  ConfusionMatrix cm(n_classes, std::vector<std::size_t>(n_classes, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++cm.at(static_cast<std::size_t>(truth[i])).at(static_cast<std::size_t>(predicted[i]));
  }
  return cm;
}

struct ConfusionMetrics {
  double accuracy = 0.0;
  double kappa = 0.0;
  double mcc = 0.0;
  double f1_macro = 0.0;
  double precision_macro = 0.0;
  double recall_macro = 0.0;
};

// Every count-based metric. Degenerate denominators: 0/0 precision, recall
// and F1 are 0; kappa and MCC are 1 when there are no errors and 0
// otherwise. Macro averages run over classes present in the truth or the
// predictions.
inline ConfusionMetrics MetricsFromConfusion(const ConfusionMatrix& cm) {
  const std::size_t k = cm.size();
  std::vector<double> row(k, 0.0), col(k, 0.0);
  double total = 0.0, trace = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (cm[i].size() != k) throw Error(Errc::kDimensionMismatch, "confusion matrix not square");
    for (std::size_t j = 0; j < k; ++j) {
      const auto v = static_cast<double>(cm[i][j]);
      row[i] += v;
      col[j] += v;
      total += v;
      if (i == j) trace += v;
    }
  }
  if (total == 0.0) throw Error(Errc::kEmptyInput, "confusion matrix is empty");

  ConfusionMetrics m;
  m.accuracy = trace / total;
  const bool perfect = trace == total;

  double expected = 0.0;
  for (std::size_t i = 0; i < k; ++i) expected += row[i] * col[i];
  const double p_e = expected / (total * total);
  m.kappa = p_e < 1.0 ? (m.accuracy - p_e) / (1.0 - p_e) : (perfect ? 1.0 : 0.0);

  double sum_pt = 0.0, sum_pp = 0.0, sum_tt = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sum_pt += col[i] * row[i];
    sum_pp += col[i] * col[i];
    sum_tt += row[i] * row[i];
  }
  const double denom = std::sqrt((total * total - sum_pp) * (total * total - sum_tt));
  m.mcc = denom > 0.0 ? (trace * total - sum_pt) / denom : (perfect ? 1.0 : 0.0);

  std::size_t present = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (row[i] == 0.0 && col[i] == 0.0) continue;
    ++present;
    const double tp = static_cast<double>(cm[i][i]);
    const double precision = col[i] > 0.0 ? tp / col[i] : 0.0;
    const double recall = row[i] > 0.0 ? tp / row[i] : 0.0;
    const double f1 =
        precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    m.precision_macro += precision;
    m.recall_macro += recall;
    m.f1_macro += f1;
  }
  m.precision_macro /= static_cast<double>(present);
  m.recall_macro /= static_cast<double>(present);
  m.f1_macro /= static_cast<double>(present);
  return m;
}

// sqrt of the mean squared gap between each probability row and the one-hot
// truth, over all (instance, class) pairs.
inline double ProbabilityRmse(const Matrix& proba, std::span<const int> truth) {
  if (proba.rows() != truth.size() || proba.empty()) {
    throw Error(Errc::kLengthMismatch, "one probability row per truth label required");
  }
  double sum = 0.0;
  for (std::size_t r = 0; r < proba.rows(); ++r) {
    for (std::size_t c = 0; c < proba.cols(); ++c) {
      const double target = static_cast<int>(c) == truth[r] ? 1.0 : 0.0;
      const double d = proba(r, c) - target;
      sum += d * d;
    }
  }
  return std::sqrt(sum / static_cast<double>(proba.rows() * proba.cols()));
}

inline EvalReport MakeEvalReport(std::vector<std::string> classes, std::span<const int> truth,
                                 std::span<const int> predicted, const Matrix& proba) {
  if (truth.empty()) throw Error(Errc::kEmptyInput, "nothing to evaluate");
  EvalReport report;
  report.confusion = BuildConfusion(classes.size(), truth, predicted);
  report.classes = std::move(classes);
  const auto m = MetricsFromConfusion(report.confusion);
  report.accuracy = m.accuracy;
  report.kappa = m.kappa;
  report.mcc = m.mcc;
  report.f1_macro = m.f1_macro;
  report.precision_macro = m.precision_macro;
  report.recall_macro = m.recall_macro;
  report.rmse = ProbabilityRmse(proba, truth);
  return report;
}

inline void to_json(nlohmann::json& j, const EvalReport& r) {
  j = nlohmann::json{{"schema_version", kEvalReportSchemaVersion},
                     {"classes", r.classes},
                     {"confusion", r.confusion},
                     {"accuracy", r.accuracy},
                     {"kappa", r.kappa},
                     {"rmse", r.rmse},
                     {"mcc", r.mcc},
                     {"f1_macro", r.f1_macro},
                     {"precision_macro", r.precision_macro},
                     {"recall_macro", r.recall_macro}};
}

}  // namespace aerolens

#endif  // AEROLENS_METRICS_HPP_
