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

#ifndef AEROLENS_CLI_HPP_
#define AEROLENS_CLI_HPP_

// The `aerolens` command line. Exit codes: 0 success (or help), 1 pipeline
// failure, 2 usage or configuration error.

#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <string>

#include "CLI11.hpp"
#include "aerolens/config.hpp"
#include "aerolens/error.hpp"
#include "aerolens/pipeline.hpp"

namespace aerolens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPipeline = 1;
inline constexpr int kExitUsage = 2;

struct CliOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::string> out;
  std::optional<std::string> classifier;
  std::optional<std::string> target;
  std::optional<double> beta;
  bool recluster = false;
};

inline PipelineConfig ResolveConfig(const CliOverrides& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : LoadConfigFile(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (o.k) c.k = *o.k;
  if (o.out) c.out_dir = *o.out;
  if (o.classifier) c.classifier.variant = *ParseVariant(*o.classifier);
  if (o.target) c.target = *o.target;
  if (o.beta) c.beta = *o.beta;
  if (o.recluster) c.recluster = true;
  ValidateConfig(c);
  return c;
}

inline int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"AeroLens: indoor air pollution clustering, potency and exposure", "aerolens"};
  app.fallthrough();
  app.require_subcommand(1);
  CliOverrides o;
  app.add_option("--config", o.config_path, "JSON pipeline configuration");
  app.add_option("--seed", o.seed, "Master random seed");
  app.add_option("--k", o.k, "Number of clusters");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--classifier", o.classifier, "Classifier variant")
      ->check(CLI::IsMember({"dt", "rf", "nb", "svm"}));
  app.add_option("--target", o.target, "Classification target")
      ->check(CLI::IsMember({"cluster", "activity"}));
  app.add_option("--beta", o.beta, "Potency scale factor");
  app.add_flag("--recluster", o.recluster,
               "Re-run k-means on personal data instead of using frozen centroids");

  auto* synth =
      app.add_subcommand("synth", "Generate a synthetic 24 h day (and optional training corpus)");
  auto* fit = app.add_subcommand("fit", "Cluster, classify, explain and rank reference data");
  auto* exposure =
      app.add_subcommand("exposure", "Score personal exposure against fitted artifacts");
  auto* segment =
      app.add_subcommand("segment", "Segment a day of readings into an activity timeline");
  auto* report =
      app.add_subcommand("report", "Explanation report and learning curve from fitted artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const PipelineConfig config = ResolveConfig(o);
    if (synth->parsed()) CmdSynth(config, out);
    if (fit->parsed()) CmdFit(config, out);
    if (exposure->parsed()) CmdExposure(config, out);
    if (segment->parsed()) CmdSegment(config, out);
    if (report->parsed()) CmdReport(config, out);
  } catch (const PipelineError& e) {
    err << "error in stage " << e.stage() << ": " << e.what() << "\n";
    return kExitPipeline;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::kConfig ? kExitUsage : kExitPipeline;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}

}  // namespace aerolens

#endif  // AEROLENS_CLI_HPP_
