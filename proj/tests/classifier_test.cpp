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

#include "aerolens/classifier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "aerolens/split.hpp"

namespace aerolens {
namespace {

struct Problem {
  Matrix x;
  std::vector<int> y;
};

// Three noisy classes in five features.
Problem ThreeClasses(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  Problem p{Matrix(3 * per_class, 5), std::vector<int>(3 * per_class)};
  const double centres[3][5] = {
      {0.2, 0.8, 0.1, 0.3, 0.3}, {0.7, 0.3, 0.5, 0.8, 0.6}, {0.4, 0.5, 0.9, 0.1, 0.9}};
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const auto c = i % 3;
    p.y[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < 5; ++j) p.x(i, j) = rng.Normal(centres[c][j], 0.08);
  }
  return p;
}

ClassifierSpec Spec(ClassifierVariant v) {
  ClassifierSpec s;
  s.variant = v;
  s.forest.n_trees = 10;
  return s;
}

constexpr ClassifierVariant kVariants[] = {
    ClassifierVariant::kDecisionTree, ClassifierVariant::kRandomForest,
    ClassifierVariant::kGaussianNB, ClassifierVariant::kLinearSvm};

TEST(HoldoutSplit, SevenThree) {
  const auto s = HoldoutSplit(10, {}, 0.7, 1);
  EXPECT_EQ(s.train.size(), 7u);
  EXPECT_EQ(s.test.size(), 3u);
}

TEST(HoldoutSplit, StratifiedAndDeterministic) {
  std::vector<int> labels(20, 0);
  for (std::size_t i = 10; i < 20; ++i) labels[i] = 1;
  const auto s = HoldoutSplit(20, labels, 0.7, 5);
  std::size_t train_ones = 0, test_ones = 0;
  for (auto i : s.train) train_ones += labels[i];
  for (auto i : s.test) test_ones += labels[i];
  EXPECT_EQ(s.train.size(), 14u);
  EXPECT_EQ(train_ones, 7u);
  EXPECT_EQ(test_ones, 3u);
  const auto again = HoldoutSplit(20, labels, 0.7, 5);
  EXPECT_EQ(again.train, s.train);
  EXPECT_NE(HoldoutSplit(20, labels, 0.7, 6).train, s.train);
}

TEST(HoldoutSplit, Errors) {
  EXPECT_THROW(HoldoutSplit(0, {}, 0.7, 1), Error);
  EXPECT_THROW(HoldoutSplit(10, {}, 1.0, 1), Error);
}

TEST(GaussianNaiveBayes, SymmetricQueryIsEven) {
  const Matrix x{{-1.5}, {-0.5}, {0.5}, {1.5}};
  const std::vector<int> y{0, 0, 1, 1};
  ClassifierModel m = TrainClassifier(x, y, {"A", "B"}, Spec(ClassifierVariant::kGaussianNB), 1);
  const auto p = PredictProbaRow(m, std::vector<double>{0.0});
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[1], 0.5, 1e-12);
  EXPECT_EQ(Predict(m, Matrix{{0.0}})[0], 0);
}

TEST(GaussianNaiveBayes, ConfidentAtClassMean) {
  const Matrix x{{0.0}, {0.001}, {5.0}, {5.001}};
  const auto nb = TrainGaussianNaiveBayes(x, std::vector<int>{0, 0, 1, 1}, 2);
  EXPECT_GT(nb.Posterior(std::vector<double>{5.0005})[1], 0.99);
}

TEST(GaussianNaiveBayes, SixPointClosedForm) {
  const Matrix x{{1, 2}, {2, 3}, {3, 3}, {6, 5}, {7, 8}, {8, 6}};
  const std::vector<int> y{0, 0, 0, 1, 1, 1};
  const auto nb = TrainGaussianNaiveBayes(x, y, 2);
  // Hand statistics: class 0 means (2, 8/3), variances (2/3, 2/9);
  // class 1 means (7, 19/3), variances (2/3, 14/9).
  const double mean[2][2] = {{2.0, 8.0 / 3}, {7.0, 19.0 / 3}};
  const double var[2][2] = {{2.0 / 3 + 1e-9, 2.0 / 9 + 1e-9}, {2.0 / 3 + 1e-9, 14.0 / 9 + 1e-9}};
  for (const auto& q :
       {std::vector<double>{4, 4}, std::vector<double>{5, 4.5}, std::vector<double>{3.5, 5}}) {
    double joint[2];
    for (int c = 0; c < 2; ++c) {
      joint[c] = 0.5;
      for (int f = 0; f < 2; ++f) {
        const double d = q[f] - mean[c][f];
        joint[c] *=
            std::exp(-d * d / (2 * var[c][f])) / std::sqrt(2 * std::numbers::pi * var[c][f]);
      }
    }
    const auto post = nb.Posterior(q);
    EXPECT_NEAR(post[0], joint[0] / (joint[0] + joint[1]), 1e-9);
    EXPECT_NEAR(post[1], joint[1] / (joint[0] + joint[1]), 1e-9);
  }
}

TEST(GaussianNaiveBayes, EmptyClassRejected) {
  EXPECT_THROW(TrainGaussianNaiveBayes(Matrix{{1}}, std::vector<int>{0}, 2), Error);
}

TEST(LinearSvm, SeparableOneDimensional) {
  const Matrix x{{-2}, {-1}, {1}, {2}};
  const std::vector<int> y{0, 0, 1, 1};
  for (double scale : {1.0, 0.1, 10.0}) {
    Matrix xs = x;
    for (std::size_t i = 0; i < 4; ++i) xs(i, 0) *= scale;
    auto m = TrainClassifier(xs, y, {"neg", "pos"}, Spec(ClassifierVariant::kLinearSvm), 3);
    EXPECT_EQ(Evaluate(m, xs, y).accuracy, 1.0) << scale;
  }
}

TEST(LinearSvm, EqualMarginsPickFirstClass) {
  LinearSvm svm;
  svm.weights = {{1.0}, {1.0}};
  svm.bias = {0.0, 0.0};
  ClassifierModel m;
  m.variant = ClassifierVariant::kLinearSvm;
  m.class_list = {"A", "B"};
  m.n_features = 1;
  m.params = svm;
  EXPECT_EQ(Predict(m, Matrix{{0.3}})[0], 0);
}

TEST(LinearSvm, SingleClassRejected) {
  try {
    TrainLinearSvm(Matrix{{1}, {2}}, std::vector<int>{1, 1}, 2, {}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kSingleClass);
  }
}

TEST(DecisionTreeModel, LeafDistributionIsProbability) {
  DecisionTree tree;
  tree.nodes.push_back({-1, 0.0, -1, -1, {0.75, 0.25}});
  ClassifierModel m;
  m.class_list = {"A", "B"};
  m.n_features = 5;
  m.params = tree;
  const Matrix q(1, 5);
  EXPECT_EQ(PredictProbaRow(m, q.row(0)), (std::vector<double>{0.75, 0.25}));
  EXPECT_EQ(Predict(m, q)[0], 0);
}

TEST(Classifier, AllVariantsLearnSeparableData) {
  const auto train = ThreeClasses(60, 1);
  const auto test = ThreeClasses(30, 2);
  for (auto v : kVariants) {
    const auto m = TrainClassifier(train.x, train.y, {"a", "b", "c"}, Spec(v), 4);
    EXPECT_GE(Evaluate(m, test.x, test.y).accuracy, 0.95) << VariantKey(v);
  }
}

TEST(Classifier, ProbabilitiesAreDistributionsAndArgmaxIsLabel) {
  const auto train = ThreeClasses(40, 5);
  const auto probe = ThreeClasses(40, 6);
  for (auto v : kVariants) {
    const auto m = TrainClassifier(train.x, train.y, {"a", "b", "c"}, Spec(v), 4);
    const Matrix proba = PredictProba(m, probe.x);
    const auto labels = Predict(m, probe.x);
    for (std::size_t r = 0; r < proba.rows(); ++r) {
      double sum = 0.0;
      for (double p : proba.row(r)) {
        EXPECT_TRUE(std::isfinite(p));
        EXPECT_GE(p, 0.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      EXPECT_EQ(labels[r], static_cast<int>(ArgMax(proba.row(r))));
    }
  }
}

TEST(Classifier, DimensionMismatch) {
  const auto train = ThreeClasses(10, 5);
  const auto m = TrainClassifier(train.x, train.y, {"a", "b", "c"}, {}, 1);
  try {
    Predict(m, Matrix{{1.0, 2.0}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDimensionMismatch);
  }
}

TEST(Classifier, TrainingIsReproducible) {
  const auto train = ThreeClasses(40, 8);
  for (auto v : kVariants) {
    const auto a = TrainClassifier(train.x, train.y, {"a", "b", "c"}, Spec(v), 9);
    const auto b = TrainClassifier(train.x, train.y, {"a", "b", "c"}, Spec(v), 9);
    EXPECT_EQ(SaveModel(a), SaveModel(b)) << VariantKey(v);
  }
}

TEST(SaveModel, RoundTripPredictsIdentically) {
  const auto train = ThreeClasses(40, 10);
  Rng rng(1);
  Matrix probe(100, 5);
  for (std::size_t i = 0; i < 100; ++i) {
    for (std::size_t j = 0; j < 5; ++j) probe(i, j) = rng.Uniform();
  }
  for (auto v : kVariants) {
    auto m = TrainClassifier(train.x, train.y, {"a", "b", "c"}, Spec(v), 2);
    m.target = "cluster";
    m.input_scaling = NormalizationParams{};
    m.input_scaling->max = {1, 2, 3, 4, 5};
    const std::string text = SaveModel(m);
    const auto back = LoadModel(text);
    EXPECT_EQ(Predict(back, probe), Predict(m, probe)) << VariantKey(v);
    EXPECT_EQ(PredictProba(back, probe), PredictProba(m, probe)) << VariantKey(v);
    EXPECT_EQ(back.input_scaling, m.input_scaling);
    EXPECT_EQ(back.target, "cluster");
    EXPECT_EQ(SaveModel(back), text);
  }
}

TEST(LoadModel, CorruptAndFutureDocuments) {
  const auto train = ThreeClasses(10, 10);
  const std::string text = SaveModel(TrainClassifier(train.x, train.y, {"a", "b", "c"}, {}, 2));
  auto code = [](std::string_view doc) {
    try {
      LoadModel(doc);
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kIo;
  };
  EXPECT_EQ(code(text.substr(0, text.size() / 2)), Errc::kCorruptDocument);
  auto j = nlohmann::json::parse(text);
  j["schema_version"] = kClassifierSchemaVersion + 1;
  EXPECT_EQ(code(j.dump()), Errc::kSchemaVersionMismatch);
  j = nlohmann::json::parse(text);
  j["variant"] = "knn";
  EXPECT_EQ(code(j.dump()), Errc::kCorruptDocument);
}

}  // namespace
}  // namespace aerolens
