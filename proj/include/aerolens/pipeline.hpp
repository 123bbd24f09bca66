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

#ifndef AEROLENS_PIPELINE_HPP_
#define AEROLENS_PIPELINE_HPP_

// End-to-end commands: synth, fit, exposure, segment and report. Each reads
// a PipelineConfig, writes plain JSON/CSV artifacts into the output
// directory and prints a short human-readable summary.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aerolens/classifier.hpp"
#include "aerolens/clustering.hpp"
#include "aerolens/config.hpp"
#include "aerolens/csv.hpp"
#include "aerolens/error.hpp"
#include "aerolens/exposure.hpp"
#include "aerolens/generator.hpp"
#include "aerolens/lime.hpp"
#include "aerolens/potency.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/shapley.hpp"
#include "aerolens/split.hpp"
#include "aerolens/timeline.hpp"
#include "aerolens/weights.hpp"
#include "json.hpp"

namespace aerolens {

inline constexpr int kExplainReportSchemaVersion = 1;
inline constexpr int kExposureReportSchemaVersion = 1;

// A failure inside a named pipeline stage. Maps to exit code 1.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

namespace detail {

template <class F>
auto RunStage(std::string_view stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == Errc::kConfig) throw;
    throw PipelineError(std::string(stage), e.what());
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(std::string(stage), e.what());
  }
}

inline void RequireInput(const std::string& path, std::string_view what) {
  if (path.empty()) throw Error(Errc::kConfig, std::string(what) + " path is not set");
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(Errc::kConfig, std::string(what) + " '" + path + "' does not exist");
  }
}

inline void EnsureDir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(Errc::kConfig, "cannot create output directory '" + dir + "'");
  }
}

inline void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(Errc::kIo, "cannot write '" + path.string() + "'");
}

inline void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  WriteText(path, j.dump(2) + "\n");
}

inline std::string ReadText(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json ReadJson(const std::filesystem::path& path) {
  try {
    return nlohmann::json::parse(ReadText(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kCorruptDocument, path.string() + ": " + e.what());
  }
}

inline Dataset ReadReadings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot read '" + path + "'");
  return ParseReadingsCsv(in, path);
}

inline std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string Csv(double v) { return FormatNumber(v); }

}  // namespace detail

// Rows, labels and class names for the configured classification target.
struct TargetData {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  std::vector<std::string> classes;
};

inline TargetData BuildTarget(const std::string& target, const Dataset& data,
                              std::span<const std::size_t> cluster_labels, std::size_t k) {
  TargetData t;
  if (target == "cluster") {
    for (std::size_t c = 0; c < k; ++c) t.classes.push_back("C" + std::to_string(c));
    for (std::size_t i = 0; i < data.size(); ++i) {
      t.rows.push_back(i);
      t.labels.push_back(static_cast<int>(cluster_labels[i]));
    }
    return t;
  }
  std::vector<int> index_of(kSourceActivities.size(), -1);
  std::vector<bool> present(kSourceActivities.size(), false);
  for (const auto& r : data.readings) {
    if (r.activity && *r.activity != ActivityLabel::kUnknown) {
      present[static_cast<std::size_t>(*r.activity)] = true;
    }
  }
  for (std::size_t a = 0; a < kSourceActivities.size(); ++a) {
    if (!present[a]) continue;
    index_of[a] = static_cast<int>(t.classes.size());
    t.classes.emplace_back(ActivityName(kSourceActivities[a]));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& a = data.readings[i].activity;
    if (!a || *a == ActivityLabel::kUnknown) continue;
    t.rows.push_back(i);
    t.labels.push_back(index_of[static_cast<std::size_t>(*a)]);
  }
  if (t.classes.empty()) throw Error(Errc::kEmptyInput, "no activity-labelled readings");
  return t;
}

struct ExplainReport {
  std::string target;
  std::vector<double> importances;  // mean |SHAP| per pollutant
  std::vector<Attribution> lime;    // one per class
  WeightFactors weights;
  std::size_t background_rows = 0;
  std::size_t sample_rows = 0;
};

inline nlohmann::json ExplainReportToJson(const ExplainReport& r, const ClassifierModel& model) {
  auto by_pollutant = [](const std::vector<double>& v) {
    nlohmann::json j;
    for (Pollutant p : kAllPollutants) j[std::string(PollutantKey(p))] = v[Index(p)];
    return j;
  };
  nlohmann::json lime = nlohmann::json::array();
  for (const auto& a : r.lime) {
    lime.push_back({{"class", a.target_class},
                    {"intercept", a.base_value},
                    {"model_output", a.model_output},
                    {"coefficients", by_pollutant(a.values)}});
  }
  return {{"schema_version", kExplainReportSchemaVersion},
          {"target", r.target},
          {"classifier", VariantKey(model.variant)},
          {"shap",
           {{"method", "exact_shapley"},
            {"importances", by_pollutant(r.importances)},
            {"background_rows", r.background_rows},
            {"sample_rows", r.sample_rows}}},
          {"lime", std::move(lime)},
          {"weights", r.weights}};
}

inline std::string ExplainReportCsv(const ExplainReport& r) {
  std::string out = "method,class,no2,voc,pm10,pm2_5,pm1\nmean_abs_shap,all";
  for (double v : r.importances) out += "," + detail::Csv(v);
  out += "\n";
  for (const auto& a : r.lime) {
    out += "lime," + a.target_class;
    for (double v : a.values) out += "," + detail::Csv(v);
    out += "\n";
  }
  return out;
}

// Mean-|SHAP| importances on a sample of held-out rows against a background
// drawn from the training rows, and one LIME surrogate per class centred on
// that class's mean training row.
inline ExplainReport BuildExplainReport(const PipelineConfig& config, const ClassifierModel& model,
                                        const Matrix& features, const TargetData& target,
                                        const HoldoutIndices& split) {
  ExplainReport report;
  report.target = config.target;
  auto pick = [&](std::vector<std::size_t> pool, std::size_t n, std::string_view stream) {
    Rng rng(DeriveSeed(config.seed, stream));
    rng.Shuffle(pool);
    pool.resize(std::min(n, pool.size()));
    std::sort(pool.begin(), pool.end());
    std::vector<std::size_t> rows;
    for (auto i : pool) rows.push_back(target.rows[i]);
    return features.SelectRows(rows);
  };
  const Matrix background = pick(split.train, config.background_size, "explain/background");
  const Matrix sample = pick(split.test.empty() ? split.train : split.test, config.shap_sample_size,
                             "explain/sample");
  report.background_rows = background.rows();
  report.sample_rows = sample.rows();
  report.importances = MeanAbsShap(model, sample, background);

  for (std::size_t c = 0; c < target.classes.size(); ++c) {
    std::vector<double> centre(features.cols(), 0.0);
    std::size_t n = 0;
    for (auto i : split.train) {
      if (target.labels[i] != static_cast<int>(c)) continue;
      const auto row = features.row(target.rows[i]);
      for (std::size_t j = 0; j < centre.size(); ++j) centre[j] += row[j];
      ++n;
    }
    if (n == 0) continue;
    for (double& v : centre) v /= static_cast<double>(n);
    LimeOptions lime = config.lime;
    lime.seed = DeriveSeed(config.seed, "explain/lime", c);
    report.lime.push_back(LimeExplain(model, centre, lime, c));
  }

  if (config.weights) {
    const auto& w = *config.weights;
    const double top = *std::max_element(w.begin(), w.end());
    report.weights.provenance = "config";
    for (std::size_t j = 0; j < kPollutantCount; ++j) report.weights.weights[j] = w[j] / top;
  } else {
    report.weights = DeriveWeightFactors(report.importances, "mean_abs_shap");
  }
  return report;
}

struct FitResult {
  PreprocessReport preprocess;
  ClusterModel clusters;
  std::optional<ElbowCurve> elbow;
  std::optional<double> silhouette;
  ClassifierModel classifier;
  EvalReport eval;
  ExplainReport explain;
  PotencyTable potency;
};

namespace detail {

inline Matrix SubsampleRows(const Matrix& x, std::size_t n, std::uint64_t seed,
                            std::vector<std::size_t>* chosen = nullptr) {
  std::vector<std::size_t> rows(x.rows());
  std::iota(rows.begin(), rows.end(), 0);
  if (rows.size() > n) {
    Rng rng(seed);
    rng.Shuffle(rows);
    rows.resize(n);
    std::sort(rows.begin(), rows.end());
  }
  if (chosen) *chosen = rows;
  return x.SelectRows(rows);
}

inline std::optional<double> SampledSilhouette(const Matrix& x, const Matrix& centroids,
                                               std::size_t sample, std::uint64_t seed) {
  const Matrix sub = SubsampleRows(x, sample, seed);
  const auto labels = AssignToCentroids(centroids, sub);
  try {
    return Silhouette(sub, labels);
  } catch (const Error&) {
    return std::nullopt;
  }
}

inline ClassifierModel TrainOnSplit(const PipelineConfig& config, const Matrix& features,
                                    const TargetData& target, const HoldoutIndices& split,
                                    const NormalizationParams& scaling) {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (auto i : split.train) {
    rows.push_back(target.rows[i]);
    labels.push_back(target.labels[i]);
  }
  auto model = TrainClassifier(features.SelectRows(rows), labels, target.classes, config.classifier,
                               DeriveSeed(config.seed, "fit/classifier"));
  model.target = config.target;
  model.input_scaling = scaling;
  return model;
}

inline EvalReport EvaluateOnSplit(const ClassifierModel& model, const Matrix& features,
                                  const TargetData& target, const std::vector<std::size_t>& part) {
  std::vector<std::size_t> rows;
  std::vector<int> labels;
  for (auto i : part) {
    rows.push_back(target.rows[i]);
    labels.push_back(target.labels[i]);
  }
  return Evaluate(model, features.SelectRows(rows), labels);
}

}  // namespace detail

// preprocess -> normalize -> elbow diagnostics -> k-means -> classifier ->
// SHAP/LIME -> weight factors -> cluster potency, persisted to out_dir.
inline FitResult CmdFit(const PipelineConfig& config, std::ostream& log) {
  ValidateConfig(config);
  detail::RequireInput(config.reference_path, "reference data");
  detail::EnsureDir(config.out_dir);
  const std::filesystem::path out(config.out_dir);
  FitResult result;

  const Dataset raw =
      detail::RunStage("ingest", [&] { return detail::ReadReadings(config.reference_path); });
  const Dataset data = detail::RunStage("preprocess", [&] {
    auto [clean, report] = Preprocess(raw);
    result.preprocess = report;
    if (clean.size() < config.k) {
      throw Error(Errc::kTooFewPoints,
                  std::to_string(clean.size()) + " readings after preprocessing");
    }
    return clean;
  });
  const NormalizationParams norm =
      detail::RunStage("normalize", [&] { return FitNormalizer(data); });
  const Matrix x = ApplyNormalizer(norm, data);

  detail::RunStage("elbow", [&] {
    const std::size_t k_max = std::min(config.elbow_k_max, x.rows());
    if (k_max <= config.elbow_k_min) return;
    result.elbow = ElbowSelect(x, config.elbow_k_min, k_max, config.seed, config.kmeans);
  });
  result.clusters = detail::RunStage(
      "cluster", [&] { return KMeansFit(x, config.k, config.seed, config.kmeans, norm); });
  result.silhouette =
      detail::SampledSilhouette(x, result.clusters.centroids, config.silhouette_sample,
                                DeriveSeed(config.seed, "fit/silhouette"));
  const auto cluster_labels = Assign(result.clusters, x);

  const TargetData target = detail::RunStage(
      "classify", [&] { return BuildTarget(config.target, data, cluster_labels, config.k); });
  const HoldoutIndices split = detail::RunStage("classify", [&] {
    return HoldoutSplit(target.rows.size(), target.labels, config.train_fraction,
                        DeriveSeed(config.seed, "fit/split"));
  });
  result.classifier = detail::RunStage(
      "classify", [&] { return detail::TrainOnSplit(config, x, target, split, norm); });
  result.eval = detail::RunStage("classify", [&] {
    return detail::EvaluateOnSplit(result.classifier, x, target,
                                   split.test.empty() ? split.train : split.test);
  });
  result.explain = detail::RunStage(
      "explain", [&] { return BuildExplainReport(config, result.classifier, x, target, split); });
  result.potency = detail::RunStage("potency", [&] {
    return ClusterPotencyTable(result.clusters, data, result.explain.weights, config.beta,
                               config.tracked);
  });

  detail::RunStage("write", [&] {
    detail::WriteJson(out / "cluster-model.json", result.clusters);
    detail::WriteText(out / "classifier.json", SaveModel(result.classifier));
    detail::WriteJson(out / "weights.json", result.explain.weights);
    detail::WriteJson(out / "potency.json", result.potency);
    detail::WriteJson(out / "eval-report.json", result.eval);
    detail::WriteJson(out / "explain-report.json",
                      ExplainReportToJson(result.explain, result.classifier));
    detail::WriteText(out / "explain-report.csv", ExplainReportCsv(result.explain));
    std::string elbow = "k,wcss,second_difference,silhouette\n";
    if (result.elbow) {
      for (const auto& p : result.elbow->points) {
        const auto s = detail::SampledSilhouette(x, p.centroids, config.silhouette_sample,
                                                 DeriveSeed(config.seed, "fit/silhouette"));
        elbow += std::to_string(p.k) + "," + detail::Csv(p.wcss) + "," +
                 (p.second_difference ? detail::Csv(*p.second_difference) : "") + "," +
                 (s ? detail::Csv(*s) : "") + "\n";
      }
    }
    detail::WriteText(out / "elbow.csv", elbow);
  });

  log << "readings: " << result.preprocess.input_count << " in, " << result.preprocess.output_count
      << " kept (null " << result.preprocess.dropped_null << ", negative "
      << result.preprocess.dropped_negative << ", duplicate " << result.preprocess.dropped_duplicate
      << ")\n";
  if (result.elbow) log << "elbow suggests k = " << result.elbow->chosen_k << "\n";
  log << "k-means k = " << config.k << ", wcss = " << result.clusters.wcss;
  if (result.silhouette) log << ", silhouette = " << detail::Fixed(*result.silhouette, 3);
  log << "\n";
  log << VariantKey(config.classifier.variant) << " on " << config.target
      << ": accuracy = " << detail::Fixed(result.eval.accuracy, 4)
      << ", kappa = " << detail::Fixed(result.eval.kappa, 4)
      << ", mcc = " << detail::Fixed(result.eval.mcc, 4) << "\n";
  log << "weights (" << result.explain.weights.provenance << "):";
  for (Pollutant p : kAllPollutants) {
    log << " " << PollutantKey(p) << "=" << detail::Fixed(result.explain.weights[p], 4);
  }
  log << "\n";
  for (std::size_t r = 0; r < result.potency.ranking.size(); ++r) {
    const auto& c = result.potency.clusters[result.potency.ranking[r]];
    log << "rank " << r + 1 << ": C" << c.cluster << " potency " << detail::Fixed(c.potency, 1)
        << " (dominant " << PollutantKey(c.dominant) << ", n = " << c.instance_count << ")\n";
  }
  return result;
}

// Writes day.csv and timeline-truth.json, plus corpus.csv when a training
// corpus is configured.
inline void CmdSynth(const PipelineConfig& config, std::ostream& log) {
  ValidateConfig(config);
  detail::EnsureDir(config.out_dir);
  const std::filesystem::path out(config.out_dir);
  const Timestamp day_start = *ParseDate(config.synth.date);
  DayOptions day_options;
  day_options.day_start = day_start;
  day_options.sampling_period_s = config.synth.sampling_period_s;
  if (!config.synth.person_id.empty()) day_options.person_id = config.synth.person_id;
  std::pair<Dataset, ActivityTimeline> day;
  try {
    day = GenerateDaySchedule(config.synth.schedule, DeriveSeed(config.seed, "synth/day"),
                              day_options);
  } catch (const Error& e) {
    throw Error(Errc::kConfig, std::string("synth.schedule: ") + e.what());
  }
  detail::RunStage("write", [&] {
    detail::WriteText(out / "day.csv", ToCsv(day.first));
    detail::WriteJson(out / "timeline-truth.json", day.second);
  });
  log << "day: " << day.first.size() << " readings, " << day.second.segments.size()
      << " scheduled segments\n";
  if (config.synth.corpus.empty()) return;

  Dataset corpus;
  corpus.source_tag = "synthetic:corpus";
  Timestamp t = day_start;
  for (std::size_t i = 0; i < config.synth.corpus.size(); ++i) {
    const auto& entry = config.synth.corpus[i];
    Dataset trace;
    try {
      trace = GenerateActivityTrace(entry.activity, entry.minutes, config.synth.sampling_period_s,
                                    DeriveSeed(config.seed, "synth/corpus", i), {t, std::nullopt});
    } catch (const Error& e) {
      throw Error(Errc::kConfig, std::string("synth.corpus: ") + e.what());
    }
    t += static_cast<Timestamp>(trace.size()) * config.synth.sampling_period_s;
    for (auto& r : trace.readings) corpus.readings.push_back(std::move(r));
  }
  detail::RunStage("write", [&] { detail::WriteText(out / "corpus.csv", ToCsv(corpus)); });
  log << "corpus: " << corpus.size() << " readings over " << config.synth.corpus.size()
      << " activity blocks\n";
}

inline std::vector<ExposureReport> CmdExposure(const PipelineConfig& config, std::ostream& log) {
  ValidateConfig(config);
  if (config.personal_paths.empty()) throw Error(Errc::kConfig, "paths.personal is empty");
  for (const auto& p : config.personal_paths) detail::RequireInput(p, "personal data");
  detail::EnsureDir(config.out_dir);
  const std::filesystem::path artifacts(config.ArtifactsDir());
  const std::filesystem::path out(config.out_dir);

  const ClusterModel model = detail::RunStage("load-artifacts", [&] {
    return ClusterModelFromJson(detail::ReadJson(artifacts / "cluster-model.json"));
  });
  const PotencyTable table = detail::RunStage("load-artifacts", [&] {
    return PotencyTableFromJson(detail::ReadJson(artifacts / "potency.json"));
  });
  if (table.clusters.size() != model.k) {
    throw PipelineError("load-artifacts", "potency table and cluster model disagree on k");
  }

  std::vector<PersonDay> cohort;
  detail::RunStage("ingest", [&] {
    for (const auto& path : config.personal_paths) {
      const Dataset raw = detail::ReadReadings(path);
      std::map<std::string, Dataset> groups;
      std::vector<std::string> order;
      const std::string fallback = std::filesystem::path(path).stem().string();
      for (const auto& r : raw.readings) {
        const std::string id = r.person_id.value_or(fallback);
        if (!groups.count(id)) order.push_back(id);
        groups[id].readings.push_back(r);
      }
      for (const auto& id : order) {
        auto [clean, report] = Preprocess(groups[id]);
        cohort.push_back({id, std::move(clean)});
      }
    }
  });
  CohortOptions options;
  options.recluster = config.recluster;
  options.seed = config.seed;
  options.kmeans = config.kmeans;
  const auto reports = detail::RunStage(
      "exposure", [&] { return BuildCohortReports(model, table, cohort, options); });

  detail::RunStage("write", [&] {
    nlohmann::json persons = nlohmann::json::array();
    for (const auto& r : reports) persons.push_back(r);
    std::vector<std::string> tracked;
    for (Pollutant p : table.tracked) tracked.emplace_back(PollutantKey(p));
    detail::WriteJson(out / "exposure-report.json",
                      {{"schema_version", kExposureReportSchemaVersion},
                       {"assignment", config.recluster ? "recluster" : "frozen_centroids"},
                       {"tracked_pollutants", tracked},
                       {"persons", std::move(persons)}});
    std::string csv = "person_id,date,total_exposure";
    for (std::size_t c = 0; c < model.k; ++c) csv += ",count_c" + std::to_string(c);
    for (Pollutant p : table.tracked) csv += "," + std::string(PollutantKey(p)) + "_raw";
    for (Pollutant p : table.tracked) csv += "," + std::string(PollutantKey(p)) + "_normalized";
    csv += "\n";
    for (const auto& r : reports) {
      csv += r.person_id + "," + r.date + "," + detail::Csv(r.total_exposure);
      for (auto c : r.counts) csv += "," + std::to_string(c);
      for (double v : r.raw_exposure) csv += "," + detail::Csv(v);
      for (double v : r.normalized_exposure) csv += "," + detail::Fixed(RoundHalfUp(v, 2), 2);
      csv += "\n";
    }
    detail::WriteText(out / "cohort.csv", csv);
  });
  for (const auto& r : reports) {
    log << r.person_id << " (" << r.date << "): total exposure " << detail::Csv(r.total_exposure)
        << "\n";
  }
  return reports;
}

inline Segmentation CmdSegment(const PipelineConfig& config, std::ostream& log) {
  ValidateConfig(config);
  detail::RequireInput(config.day_path, "day data");
  detail::EnsureDir(config.out_dir);
  const std::filesystem::path out(config.out_dir);
  const ClassifierModel model = detail::RunStage("load-artifacts", [&] {
    return LoadModel(
        detail::ReadText(std::filesystem::path(config.ArtifactsDir()) / "classifier.json"));
  });
  const Dataset day = detail::RunStage(
      "ingest", [&] { return Preprocess(detail::ReadReadings(config.day_path)).first; });
  const Segmentation seg =
      detail::RunStage("segment", [&] { return SegmentActivities(model, day, config.segment); });
  detail::RunStage("write", [&] {
    detail::WriteJson(out / "timeline.json", seg.timeline);
    detail::WriteText(out / "timeline.csv", TimelineCsv(seg.timeline));
  });
  for (const auto& s : seg.timeline.segments) {
    log << FormatTimestamp(s.start) << " - " << FormatTimestamp(s.end) << "  "
        << ActivityName(s.label) << " (" << detail::Fixed(s.confidence, 2) << ")\n";
  }
  return seg;
}

// Regenerates the explanation report from fitted artifacts and adds a
// learning curve over random subsets of the reference data.
inline void CmdReport(const PipelineConfig& config, std::ostream& log) {
  ValidateConfig(config);
  detail::RequireInput(config.reference_path, "reference data");
  detail::EnsureDir(config.out_dir);
  const std::filesystem::path artifacts(config.ArtifactsDir());
  const std::filesystem::path out(config.out_dir);
  const ClusterModel clusters = detail::RunStage("load-artifacts", [&] {
    return ClusterModelFromJson(detail::ReadJson(artifacts / "cluster-model.json"));
  });
  const ClassifierModel classifier = detail::RunStage(
      "load-artifacts", [&] { return LoadModel(detail::ReadText(artifacts / "classifier.json")); });
  const Dataset data = detail::RunStage(
      "ingest", [&] { return Preprocess(detail::ReadReadings(config.reference_path)).first; });
  const Matrix x = ApplyNormalizer(clusters.normalization, data);
  const auto cluster_labels = Assign(clusters, x);
  const TargetData target = detail::RunStage(
      "classify", [&] { return BuildTarget(config.target, data, cluster_labels, clusters.k); });
  if (target.classes != classifier.class_list) {
    throw PipelineError("load-artifacts", "classifier classes do not match the configured target");
  }
  const HoldoutIndices split = detail::RunStage("classify", [&] {
    return HoldoutSplit(target.rows.size(), target.labels, config.train_fraction,
                        DeriveSeed(config.seed, "fit/split"));
  });
  const ExplainReport explain = detail::RunStage(
      "explain", [&] { return BuildExplainReport(config, classifier, x, target, split); });

  std::string curve = "instances,accuracy,kappa,rmse,mcc,f1_macro,precision_macro,recall_macro\n";
  detail::RunStage("learning-curve", [&] {
    const std::size_t n = target.rows.size();
    const double fractions[] = {0.1, 0.25, 0.5, 0.75, 1.0};
    for (std::size_t f = 0; f < std::size(fractions); ++f) {
      const auto size = static_cast<std::size_t>(fractions[f] * static_cast<double>(n));
      if (size < 10) continue;
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), 0);
      Rng rng(DeriveSeed(config.seed, "report/learning-curve", f));
      rng.Shuffle(pool);
      pool.resize(size);
      std::sort(pool.begin(), pool.end());
      TargetData subset;
      subset.classes = target.classes;
      for (auto i : pool) {
        subset.rows.push_back(target.rows[i]);
        subset.labels.push_back(target.labels[i]);
      }
      try {
        const auto sub_split = HoldoutSplit(size, subset.labels, config.train_fraction,
                                            DeriveSeed(config.seed, "fit/split"));
        if (sub_split.test.empty()) continue;
        const auto model =
            detail::TrainOnSplit(config, x, subset, sub_split, clusters.normalization);
        const auto e = detail::EvaluateOnSplit(model, x, subset, sub_split.test);
        curve += std::to_string(size) + "," + detail::Csv(e.accuracy) + "," + detail::Csv(e.kappa) +
                 "," + detail::Csv(e.rmse) + "," + detail::Csv(e.mcc) + "," +
                 detail::Csv(e.f1_macro) + "," + detail::Csv(e.precision_macro) + "," +
                 detail::Csv(e.recall_macro) + "\n";
      } catch (const Error&) {
        // Subsets too small to cover every class are skipped.
      }
    }
  });
  detail::RunStage("write", [&] {
    detail::WriteJson(out / "explain-report.json", ExplainReportToJson(explain, classifier));
    detail::WriteText(out / "explain-report.csv", ExplainReportCsv(explain));
    detail::WriteText(out / "learning-curve.csv", curve);
  });
  log << "mean |SHAP|:";
  for (Pollutant p : kAllPollutants) {
    log << " " << PollutantKey(p) << "=" << detail::Fixed(explain.importances[Index(p)], 4);
  }
  log << "\n";
}

}  // namespace aerolens

#endif  // AEROLENS_PIPELINE_HPP_
