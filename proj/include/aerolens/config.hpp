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

#ifndef AEROLENS_CONFIG_HPP_
#define AEROLENS_CONFIG_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/clustering.hpp"
#include "aerolens/error.hpp"
#include "aerolens/generator.hpp"
#include "aerolens/lime.hpp"
#include "aerolens/potency.hpp"
#include "aerolens/timeline.hpp"
#include "aerolens/types.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kConfigSchemaVersion = 1;

struct CorpusEntry {
  ActivityLabel activity = ActivityLabel::kCooking;
  double minutes = 0.0;
};

struct SynthConfig {
  std::string date = "2023-07-28";
  std::string person_id;
  int sampling_period_s = 60;
  std::vector<ScheduleSegment> schedule;
  std::vector<CorpusEntry> corpus;
};

struct PipelineConfig {
  std::string reference_path;
  std::vector<std::string> personal_paths;
  std::string day_path;
  std::string out_dir = "out";
  std::string artifacts_dir;  // empty = out_dir

  std::size_t k = 3;
  std::uint64_t seed = 42;
  double train_fraction = 0.7;
  std::string target = "cluster";  // "cluster" or "activity"

  ClassifierSpec classifier;

  std::size_t elbow_k_min = 2;
  std::size_t elbow_k_max = 8;
  KMeansOptions kmeans;
  std::size_t silhouette_sample = 2000;

  std::size_t background_size = 100;
  std::size_t shap_sample_size = 200;
  LimeOptions lime;

  double beta = 2.0;
  std::vector<Pollutant> tracked = DefaultTrackedPollutants();
  std::optional<std::array<double, kPollutantCount>> weights;

  SegmentOptions segment;
  SynthConfig synth;
  bool recluster = false;

  std::string ArtifactsDir() const { return artifacts_dir.empty() ? out_dir : artifacts_dir; }
};

namespace detail {

inline std::string FormatClock(int minute_of_day) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute_of_day / 60, minute_of_day % 60);
  return buf;
}

inline int ParseClock(const std::string& text) {
  int h = 0, m = 0;
  if (text.size() != 5 || text[2] != ':' || !ParseDigits(text, 0, 2, h) ||
      !ParseDigits(text, 3, 2, m) || h > 24 || m > 59 || (h == 24 && m != 0)) {
    throw Error(Errc::kConfig, "bad clock time '" + text + "', expected HH:MM");
  }
  return h * 60 + m;
}

inline ActivityLabel ParseActivityOrThrow(const std::string& name) {
  const auto a = ParseActivity(name);
  if (!a || *a == ActivityLabel::kUnknown) {
    throw Error(Errc::kConfig, "unknown activity '" + name + "'");
  }
  return *a;
}

}  // namespace detail

inline nlohmann::json ConfigToJson(const PipelineConfig& c) {
  using nlohmann::json;
  json schedule = json::array();
  for (const auto& s : c.synth.schedule) {
    schedule.push_back({{"start", detail::FormatClock(s.start_minute)},
                        {"minutes", s.duration_minutes},
                        {"activity", ActivityName(s.activity)}});
  }
  json corpus = json::array();
  for (const auto& e : c.synth.corpus) {
    corpus.push_back({{"activity", ActivityName(e.activity)}, {"minutes", e.minutes}});
  }
  std::vector<std::string> tracked;
  for (Pollutant p : c.tracked) tracked.emplace_back(PollutantKey(p));
  json weights = nullptr;
  if (c.weights) weights = *c.weights;
  return json{{"schema_version", kConfigSchemaVersion},
              {"paths",
               {{"reference", c.reference_path},
                {"personal", c.personal_paths},
                {"day", c.day_path},
                {"out", c.out_dir},
                {"artifacts", c.artifacts_dir}}},
              {"k", c.k},
              {"seed", c.seed},
              {"train_fraction", c.train_fraction},
              {"target", c.target},
              {"classifier",
               {{"variant", VariantKey(c.classifier.variant)},
                {"max_depth", c.classifier.tree.max_depth},
                {"min_leaf", c.classifier.tree.min_leaf},
                {"n_trees", c.classifier.forest.n_trees},
                {"max_features", c.classifier.forest.tree.max_features},
                {"lambda", c.classifier.svm.lambda},
                {"epochs", c.classifier.svm.epochs}}},
              {"clustering",
               {{"k_min", c.elbow_k_min},
                {"k_max", c.elbow_k_max},
                {"restarts", c.kmeans.n_restarts},
                {"max_iter", c.kmeans.max_iter},
                {"tol", c.kmeans.tol},
                {"silhouette_sample", c.silhouette_sample}}},
              {"explain",
               {{"background_size", c.background_size},
                {"sample_size", c.shap_sample_size},
                {"n_samples", c.lime.n_samples},
                {"kernel_width", c.lime.kernel_width},
                {"sigma", c.lime.sigma}}},
              {"potency", {{"beta", c.beta}, {"tracked", tracked}, {"weights", weights}}},
              {"segment",
               {{"window_minutes", c.segment.window_minutes},
                {"step_minutes", c.segment.step_minutes},
                {"votes", c.segment.votes}}},
              {"synth",
               {{"date", c.synth.date},
                {"person_id", c.synth.person_id},
                {"sampling_period_s", c.synth.sampling_period_s},
                {"schedule", std::move(schedule)},
                {"corpus", std::move(corpus)}}},
              {"recluster", c.recluster}};
}

inline void ValidateConfig(const PipelineConfig& c) {
  if (c.k < 2) throw Error(Errc::kConfig, "k must be >= 2");
  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0)) {
    throw Error(Errc::kConfig, "train_fraction must lie in (0, 1)");
  }
  if (c.target != "cluster" && c.target != "activity") {
    throw Error(Errc::kConfig, "target must be 'cluster' or 'activity'");
  }
  if (c.elbow_k_min < 2 || c.elbow_k_min >= c.elbow_k_max) {
    throw Error(Errc::kConfig, "clustering needs 2 <= k_min < k_max");
  }
  if (c.kmeans.n_restarts == 0 || c.kmeans.max_iter == 0 || !(c.kmeans.tol >= 0.0)) {
    throw Error(Errc::kConfig, "bad k-means settings");
  }
  if (c.background_size == 0 || c.shap_sample_size == 0) {
    throw Error(Errc::kConfig, "explain sizes must be >= 1");
  }
  if (c.lime.n_samples < 50 || !(c.lime.kernel_width > 0.0) || !(c.lime.sigma > 0.0)) {
    throw Error(Errc::kConfig, "bad explain settings");
  }
  if (!(c.beta > 0.0)) throw Error(Errc::kConfig, "beta must be > 0");
  if (c.tracked.empty()) throw Error(Errc::kConfig, "potency.tracked is empty");
  if (c.weights) {
    for (double w : *c.weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw Error(Errc::kConfig, "weights must be > 0");
    }
  }
  if (c.segment.window_minutes <= 0 || c.segment.step_minutes <= 0 || c.segment.votes <= 0) {
    throw Error(Errc::kConfig, "segment settings must be positive");
  }
  if (c.synth.sampling_period_s <= 0) throw Error(Errc::kConfig, "sampling_period_s must be > 0");
  if (!ParseDate(c.synth.date)) throw Error(Errc::kConfig, "synth.date must be YYYY-MM-DD");
}

// Missing keys keep their defaults.
inline PipelineConfig ConfigFromJson(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    if (j.contains("schema_version") && j.at("schema_version").get<int>() != kConfigSchemaVersion) {
      throw Error(Errc::kConfig, "unsupported config schema_version");
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      c.reference_path = p.value("reference", c.reference_path);
      if (p.contains("personal"))
        c.personal_paths = p.at("personal").get<std::vector<std::string>>();
      c.day_path = p.value("day", c.day_path);
      c.out_dir = p.value("out", c.out_dir);
      if (p.contains("artifacts") && !p.at("artifacts").is_null()) {
        c.artifacts_dir = p.at("artifacts").get<std::string>();
      }
    }
    c.k = j.value("k", c.k);
    c.seed = j.value("seed", c.seed);
    c.train_fraction = j.value("train_fraction", c.train_fraction);
    c.target = j.value("target", c.target);
    if (j.contains("classifier")) {
      const auto& cl = j.at("classifier");
      if (cl.contains("variant")) {
        const auto v = ParseVariant(cl.at("variant").get<std::string>());
        if (!v) throw Error(Errc::kConfig, "classifier.variant must be dt, rf, nb or svm");
        c.classifier.variant = *v;
      }
      c.classifier.tree.max_depth = cl.value("max_depth", c.classifier.tree.max_depth);
      c.classifier.tree.min_leaf = cl.value("min_leaf", c.classifier.tree.min_leaf);
      c.classifier.forest.tree.max_depth = c.classifier.tree.max_depth;
      c.classifier.forest.tree.min_leaf = c.classifier.tree.min_leaf;
      c.classifier.forest.n_trees = cl.value("n_trees", c.classifier.forest.n_trees);
      c.classifier.forest.tree.max_features =
          cl.value("max_features", c.classifier.forest.tree.max_features);
      c.classifier.svm.lambda = cl.value("lambda", c.classifier.svm.lambda);
      c.classifier.svm.epochs = cl.value("epochs", c.classifier.svm.epochs);
    }
    if (j.contains("clustering")) {
      const auto& cl = j.at("clustering");
      c.elbow_k_min = cl.value("k_min", c.elbow_k_min);
      c.elbow_k_max = cl.value("k_max", c.elbow_k_max);
      c.kmeans.n_restarts = cl.value("restarts", c.kmeans.n_restarts);
      c.kmeans.max_iter = cl.value("max_iter", c.kmeans.max_iter);
      c.kmeans.tol = cl.value("tol", c.kmeans.tol);
      c.silhouette_sample = cl.value("silhouette_sample", c.silhouette_sample);
    }
    if (j.contains("explain")) {
      const auto& e = j.at("explain");
      c.background_size = e.value("background_size", c.background_size);
      c.shap_sample_size = e.value("sample_size", c.shap_sample_size);
      c.lime.n_samples = e.value("n_samples", c.lime.n_samples);
      c.lime.kernel_width = e.value("kernel_width", c.lime.kernel_width);
      c.lime.sigma = e.value("sigma", c.lime.sigma);
    }
    if (j.contains("potency")) {
      const auto& p = j.at("potency");
      c.beta = p.value("beta", c.beta);
      if (p.contains("tracked")) {
        c.tracked.clear();
        for (const auto& key : p.at("tracked")) {
          const auto pol = ParsePollutant(key.get<std::string>());
          if (!pol)
            throw Error(Errc::kConfig, "unknown pollutant '" + key.get<std::string>() + "'");
          c.tracked.push_back(*pol);
        }
      }
      if (p.contains("weights") && !p.at("weights").is_null()) {
        c.weights = p.at("weights").get<std::array<double, kPollutantCount>>();
      }
    }
    if (j.contains("segment")) {
      const auto& s = j.at("segment");
      c.segment.window_minutes = s.value("window_minutes", c.segment.window_minutes);
      c.segment.step_minutes = s.value("step_minutes", c.segment.step_minutes);
      c.segment.votes = s.value("votes", c.segment.votes);
    }
    if (j.contains("synth")) {
      const auto& s = j.at("synth");
      c.synth.date = s.value("date", c.synth.date);
      c.synth.person_id = s.value("person_id", c.synth.person_id);
      c.synth.sampling_period_s = s.value("sampling_period_s", c.synth.sampling_period_s);
      if (s.contains("schedule")) {
        for (const auto& seg : s.at("schedule")) {
          c.synth.schedule.push_back(
              {detail::ParseClock(seg.at("start").get<std::string>()), seg.at("minutes").get<int>(),
               detail::ParseActivityOrThrow(seg.at("activity").get<std::string>())});
        }
      }
      if (s.contains("corpus")) {
        for (const auto& e : s.at("corpus")) {
          c.synth.corpus.push_back(
              {detail::ParseActivityOrThrow(e.at("activity").get<std::string>()),
               e.at("minutes").get<double>()});
        }
      }
    }
    c.recluster = j.value("recluster", c.recluster);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kConfig, e.what());
  }
  ValidateConfig(c);
  return c;
}

// Relative paths in the file resolve against the file's directory.
inline PipelineConfig LoadConfigFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kConfig, "cannot open config '" + path.string() + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kConfig, "config '" + path.string() + "': " + e.what());
  }
  PipelineConfig c = ConfigFromJson(j);
  const auto base = path.parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative())
      p = (base / p).lexically_normal().string();
  };
  resolve(c.reference_path);
  resolve(c.day_path);
  resolve(c.out_dir);
  resolve(c.artifacts_dir);
  for (auto& p : c.personal_paths) resolve(p);
  return c;
}

}  // namespace aerolens

#endif  // AEROLENS_CONFIG_HPP_
