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

#include "aerolens/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <optional>

namespace aerolens {
namespace {

namespace fs = std::filesystem;

std::optional<Errc> CodeOf(const nlohmann::json& j) {
  try {
    ConfigFromJson(j);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

TEST(Config, DefaultsRoundTrip) {
  const PipelineConfig defaults;
  const auto j = ConfigToJson(defaults);
  EXPECT_EQ(ConfigToJson(ConfigFromJson(j)), j);
  EXPECT_EQ(ConfigToJson(ConfigFromJson(nlohmann::json::object())), j);
}

TEST(Config, CustomValuesRoundTrip) {
  PipelineConfig c;
  c.k = 4;
  c.seed = 77;
  c.target = "activity";
  c.classifier.variant = ClassifierVariant::kGaussianNB;
  c.beta = 3.0;
  c.tracked = {Pollutant::kPm2_5, Pollutant::kVoc};
  c.weights = std::array<double, kPollutantCount>{1, 0.5, 0.25, 1, 1};
  c.synth.schedule = {{420, 45, ActivityLabel::kCooking}, {1380, 60, ActivityLabel::kSmoking}};
  c.synth.corpus = {{ActivityLabel::kPaperBurning, 120}};
  c.recluster = true;
  const auto back = ConfigFromJson(ConfigToJson(c));
  EXPECT_EQ(back.k, 4u);
  EXPECT_EQ(back.seed, 77u);
  EXPECT_EQ(back.classifier.variant, ClassifierVariant::kGaussianNB);
  EXPECT_EQ(back.tracked, c.tracked);
  EXPECT_EQ(back.weights, c.weights);
  ASSERT_EQ(back.synth.schedule.size(), 2u);
  EXPECT_EQ(back.synth.schedule[1].start_minute, 1380);
  EXPECT_EQ(back.synth.schedule[1].activity, ActivityLabel::kSmoking);
  EXPECT_TRUE(back.recluster);
  EXPECT_EQ(ConfigToJson(back), ConfigToJson(c));
}

TEST(Config, RejectsBadValues) {
  EXPECT_EQ(CodeOf({{"k", 1}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"train_fraction", 1.0}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"target", "person"}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"classifier", {{"variant", "knn"}}}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"potency", {{"beta", 0}}}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"potency", {{"tracked", {"ozone"}}}}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"potency", {{"weights", {1, 1, 0, 1, 1}}}}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"segment", {{"votes", 0}}}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"synth", {{"date", "28/07/2023"}}}}), Errc::kConfig);
  EXPECT_EQ(
      CodeOf({{"synth",
               {{"schedule", {{{"start", "25:00"}, {"minutes", 5}, {"activity", "Cooking"}}}}}}}),
      Errc::kConfig);
  EXPECT_EQ(
      CodeOf({{"synth",
               {{"schedule", {{{"start", "07:00"}, {"minutes", 5}, {"activity", "Dancing"}}}}}}}),
      Errc::kConfig);
  EXPECT_EQ(CodeOf({{"k", "three"}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"schema_version", 2}}), Errc::kConfig);
  EXPECT_EQ(CodeOf({{"clustering", {{"k_min", 5}, {"k_max", 5}}}}), Errc::kConfig);
}

TEST(Config, LoadResolvesPathsAgainstFileDirectory) {
  const fs::path dir = fs::path(AEROLENS_TEST_TMP) / "config_test";
  fs::create_directories(dir / "sub");
  const auto file = dir / "sub" / "run.json";
  std::ofstream(file) << R"({"paths": {"reference": "../data/ref.csv",
                                        "personal": ["p1.csv", "/abs/p2.csv"],
                                        "out": "results"}, "k": 3})";
  const auto c = LoadConfigFile(file);
  EXPECT_EQ(c.reference_path, (dir / "data" / "ref.csv").lexically_normal().string());
  ASSERT_EQ(c.personal_paths.size(), 2u);
  EXPECT_EQ(c.personal_paths[0], (dir / "sub" / "p1.csv").string());
  EXPECT_EQ(c.personal_paths[1], "/abs/p2.csv");
  EXPECT_EQ(c.out_dir, (dir / "sub" / "results").string());
  EXPECT_EQ(c.ArtifactsDir(), c.out_dir);
  EXPECT_TRUE(c.day_path.empty());
}

TEST(Config, LoadFailures) {
  const fs::path dir = fs::path(AEROLENS_TEST_TMP) / "config_test";
  fs::create_directories(dir);
  try {
    LoadConfigFile(dir / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfig);
  }
  std::ofstream(dir / "broken.json") << "{\"k\": ";
  try {
    LoadConfigFile(dir / "broken.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfig);
  }
}

}  // namespace
}  // namespace aerolens
