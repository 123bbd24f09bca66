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

#ifndef AEROLENS_CLASSIFIER_HPP_
#define AEROLENS_CLASSIFIER_HPP_

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/metrics.hpp"
#include "aerolens/naive_bayes.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/svm.hpp"
#include "aerolens/tree.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kClassifierSchemaVersion = 1;

enum class ClassifierVariant { kDecisionTree, kRandomForest, kGaussianNB, kLinearSvm };

inline std::string_view VariantKey(ClassifierVariant v) {
  switch (v) {
    case ClassifierVariant::kDecisionTree:
      return "dt";
    case ClassifierVariant::kRandomForest:
      return "rf";
    case ClassifierVariant::kGaussianNB:
      return "nb";
    case ClassifierVariant::kLinearSvm:
      return "svm";
  }
  return "dt";
}

inline std::optional<ClassifierVariant> ParseVariant(std::string_view key) {
  for (auto v : {ClassifierVariant::kDecisionTree, ClassifierVariant::kRandomForest,
                 ClassifierVariant::kGaussianNB, ClassifierVariant::kLinearSvm}) {
    if (VariantKey(v) == key) return v;
  }
  return std::nullopt;
}

struct ClassifierSpec {
  ClassifierVariant variant = ClassifierVariant::kDecisionTree;
  TreeParams tree;
  ForestParams forest;
  SvmParams svm;
};

struct ClassifierModel {
  ClassifierVariant variant = ClassifierVariant::kDecisionTree;
  std::vector<std::string> class_list;
  std::size_t n_features = 0;
  std::variant<DecisionTree, RandomForest, GaussianNaiveBayes, LinearSvm> params;
  // What the labels mean ("cluster", "activity", ...); informational.
  std::string target;
  // Raw readings pass through this min-max map before reaching the model.
  std::optional<NormalizationParams> input_scaling;
};

inline ClassifierModel TrainClassifier(const Matrix& x, std::span<const int> y,
                                       std::vector<std::string> class_list,
                                       const ClassifierSpec& spec, std::uint64_t seed) {
  if (class_list.empty()) throw Error(Errc::kInvalidArgument, "class_list is empty");
  if (std::set<std::string>(class_list.begin(), class_list.end()).size() != class_list.size()) {
    throw Error(Errc::kInvalidArgument, "class_list has duplicates");
  }
  if (x.empty()) throw Error(Errc::kEmptyInput, "no training rows");
  ClassifierModel model;
  model.variant = spec.variant;
  model.n_features = x.cols();
  const std::size_t k = class_list.size();
  switch (spec.variant) {
    case ClassifierVariant::kDecisionTree:
      model.params = TrainTree(x, y, k, spec.tree);
      break;
    case ClassifierVariant::kRandomForest:
      model.params = TrainForest(x, y, k, spec.forest, seed);
      break;
    case ClassifierVariant::kGaussianNB:
      model.params = TrainGaussianNaiveBayes(x, y, k);
      break;
    case ClassifierVariant::kLinearSvm:
      model.params = TrainLinearSvm(x, y, k, spec.svm, seed);
      break;
  }
  model.class_list = std::move(class_list);
  return model;
}

inline std::vector<double> PredictProbaRow(const ClassifierModel& model,
                                           std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw Error(Errc::kDimensionMismatch, "model expects " + std::to_string(model.n_features) +
                                              " features, got " + std::to_string(x.size()));
  }
  return std::visit(
      [&](const auto& p) -> std::vector<double> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          return p.Leaf(x).distribution;
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          return p.VoteShares(x);
        } else if constexpr (std::is_same_v<T, GaussianNaiveBayes>) {
          return p.Posterior(x);
        } else {
          return p.SoftmaxMargins(x);
        }
      },
      model.params);
}

inline Matrix PredictProba(const ClassifierModel& model, const Matrix& x) {
  if (x.cols() != model.n_features) {
    throw Error(Errc::kDimensionMismatch, "model expects " + std::to_string(model.n_features) +
                                              " features, got " + std::to_string(x.cols()));
  }
  Matrix out(x.rows(), model.class_list.size());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto p = PredictProbaRow(model, x.row(r));
    std::copy(p.begin(), p.end(), out.row(r).begin());
  }
  return out;
}

// Row-wise argmax of the probabilities, earliest class on ties.
inline std::vector<int> Predict(const ClassifierModel& model, const Matrix& x) {
  const Matrix proba = PredictProba(model, x);
  std::vector<int> labels(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) labels[r] = static_cast<int>(ArgMax(proba.row(r)));
  return labels;
}

inline EvalReport Evaluate(const ClassifierModel& model, const Matrix& x, std::span<const int> y) {
  if (x.empty() || y.empty()) throw Error(Errc::kEmptyInput, "nothing to evaluate");
  if (x.rows() != y.size()) throw Error(Errc::kLengthMismatch, "one label per row required");
  const Matrix proba = PredictProba(model, x);
  std::vector<int> predicted(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    predicted[r] = static_cast<int>(ArgMax(proba.row(r)));
  }
  return MakeEvalReport(model.class_list, y, predicted, proba);
}

// ---------------------------------------------------------------------------
// JSON documents

namespace detail {

inline nlohmann::json TreeToJson(const DecisionTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) {
      nodes.push_back({{"leaf", n.distribution}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"distribution", n.distribution}});
    }
  }
  return nodes;
}

inline DecisionTree TreeFromJson(const nlohmann::json& j, std::size_t n_classes,
                                 std::size_t n_features) {
  DecisionTree tree;
  for (const auto& jn : j) {
    TreeNode n;
    if (jn.contains("leaf")) {
      n.distribution = jn.at("leaf").get<std::vector<double>>();
    } else {
      n.feature = jn.at("feature").get<int>();
      n.threshold = jn.at("threshold").get<double>();
      n.left = jn.at("left").get<int>();
      n.right = jn.at("right").get<int>();
      n.distribution = jn.at("distribution").get<std::vector<double>>();
    }
    tree.nodes.push_back(std::move(n));
  }
  const auto count = static_cast<int>(tree.nodes.size());
  if (count == 0) throw Error(Errc::kCorruptDocument, "tree without nodes");
  for (const auto& n : tree.nodes) {
    if (n.distribution.size() != n_classes) {
      throw Error(Errc::kCorruptDocument, "node distribution has wrong class count");
    }
    if (!n.is_leaf() && (n.left <= 0 || n.right <= 0 || n.left >= count || n.right >= count ||
                         static_cast<std::size_t>(n.feature) >= n_features)) {
      throw Error(Errc::kCorruptDocument, "tree node references are out of range");
    }
  }
  return tree;
}

}  // namespace detail

inline nlohmann::json ClassifierToJson(const ClassifierModel& model) {
  nlohmann::json params;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, DecisionTree>) {
          params = {{"nodes", detail::TreeToJson(p)}};
        } else if constexpr (std::is_same_v<T, RandomForest>) {
          nlohmann::json trees = nlohmann::json::array();
          for (const auto& t : p.trees) trees.push_back(detail::TreeToJson(t));
          params = {{"trees", std::move(trees)}, {"tree_seeds", p.tree_seeds}};
        } else if constexpr (std::is_same_v<T, GaussianNaiveBayes>) {
          params = {{"means", p.means}, {"variances", p.variances}, {"priors", p.priors}};
        } else {
          params = {{"weights", p.weights}, {"bias", p.bias}};
        }
      },
      model.params);
  nlohmann::json j{{"schema_version", kClassifierSchemaVersion},
                   {"variant", VariantKey(model.variant)},
                   {"class_list", model.class_list},
                   {"n_features", model.n_features},
                   {"target", model.target},
                   {"parameters", std::move(params)}};
  if (model.input_scaling) j["input_scaling"] = *model.input_scaling;
  return j;
}

inline ClassifierModel ClassifierFromJson(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kClassifierSchemaVersion) {
      throw Error(Errc::kSchemaVersionMismatch,
                  "classifier schema_version " + std::to_string(version));
    }
    ClassifierModel m;
    const auto variant = ParseVariant(j.at("variant").get<std::string>());
    if (!variant) throw Error(Errc::kCorruptDocument, "unknown classifier variant");
    m.variant = *variant;
    m.class_list = j.at("class_list").get<std::vector<std::string>>();
    m.n_features = j.at("n_features").get<std::size_t>();
    m.target = j.value("target", std::string());
    if (m.class_list.empty()) throw Error(Errc::kCorruptDocument, "empty class_list");
    const std::size_t k = m.class_list.size();
    const auto& p = j.at("parameters");
    switch (m.variant) {
      case ClassifierVariant::kDecisionTree:
        m.params = detail::TreeFromJson(p.at("nodes"), k, m.n_features);
        break;
      case ClassifierVariant::kRandomForest: {
        RandomForest forest;
        forest.n_classes = k;
        for (const auto& t : p.at("trees")) {
          forest.trees.push_back(detail::TreeFromJson(t, k, m.n_features));
        }
        forest.tree_seeds = p.at("tree_seeds").get<std::vector<std::uint64_t>>();
        if (forest.trees.empty()) throw Error(Errc::kCorruptDocument, "forest without trees");
        m.params = std::move(forest);
        break;
      }
      case ClassifierVariant::kGaussianNB: {
        GaussianNaiveBayes nb;
        p.at("means").get_to(nb.means);
        p.at("variances").get_to(nb.variances);
        p.at("priors").get_to(nb.priors);
        if (nb.means.size() != k || nb.variances.size() != k || nb.priors.size() != k) {
          throw Error(Errc::kCorruptDocument, "naive Bayes tables have wrong class count");
        }
        for (std::size_t c = 0; c < k; ++c) {
          if (nb.means[c].size() != m.n_features || nb.variances[c].size() != m.n_features) {
            throw Error(Errc::kCorruptDocument, "naive Bayes tables have wrong feature count");
          }
        }
        m.params = std::move(nb);
        break;
      }
      case ClassifierVariant::kLinearSvm: {
        LinearSvm svm;
        p.at("weights").get_to(svm.weights);
        p.at("bias").get_to(svm.bias);
        if (svm.weights.size() != k || svm.bias.size() != k) {
          throw Error(Errc::kCorruptDocument, "SVM tables have wrong class count");
        }
        for (const auto& w : svm.weights) {
          if (w.size() != m.n_features) {
            throw Error(Errc::kCorruptDocument, "SVM weights have wrong feature count");
          }
        }
        m.params = std::move(svm);
        break;
      }
    }
    if (j.contains("input_scaling")) {
      m.input_scaling = j.at("input_scaling").get<NormalizationParams>();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
}

inline std::string SaveModel(const ClassifierModel& model) {
  return ClassifierToJson(model).dump(2) + "\n";
}

inline ClassifierModel LoadModel(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, e.what());
  }
  return ClassifierFromJson(j);
}

}  // namespace aerolens

#endif  // AEROLENS_CLASSIFIER_HPP_
