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

#ifndef AEROLENS_SPLIT_HPP_
#define AEROLENS_SPLIT_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/random.hpp"
#include "aerolens/types.hpp"

namespace aerolens {

struct HoldoutIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// Stratified holdout over row indices. Each label's rows are shuffled with a
// seed derived from (seed, label) and the first round(fraction * n_label)
// go to training. `labels` may be empty, in which case all rows form one
// stratum of size `n`.
inline HoldoutIndices HoldoutSplit(std::size_t n, std::span<const int> labels,
                                   double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(Errc::kInvalidArgument, "train_fraction must lie in (0, 1)");
  }
  if (n == 0) throw Error(Errc::kEmptyDataset, "cannot split zero rows");
  if (!labels.empty() && labels.size() != n) {
    throw Error(Errc::kLengthMismatch, "one label per row required");
  }
  std::map<int, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < n; ++i) strata[labels.empty() ? 0 : labels[i]].push_back(i);

  HoldoutIndices out;
  for (auto& [label, rows] : strata) {
    Rng rng(DeriveSeed(seed, "split/stratum", static_cast<std::uint64_t>(label)));
    rng.Shuffle(rows);
    const auto n_train =
        static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(rows.size())));
    out.train.insert(out.train.end(), rows.begin(), rows.begin() + n_train);
    out.test.insert(out.test.end(), rows.begin() + n_train, rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

// Dataset form, stratified by activity where readings carry one.
inline std::pair<Dataset, Dataset> HoldoutSplit(const Dataset& dataset, double train_fraction,
                                                std::uint64_t seed) {
  std::vector<int> labels;
  const bool labelled = std::any_of(dataset.readings.begin(), dataset.readings.end(),
                                    [](const Reading& r) { return r.activity.has_value(); });
  if (labelled) {
    for (const auto& r : dataset.readings) {
      labels.push_back(r.activity ? static_cast<int>(*r.activity) : -1);
    }
  }
  const auto idx = HoldoutSplit(dataset.size(), labels, train_fraction, seed);
  Dataset train, test;
  train.source_tag = test.source_tag = dataset.source_tag;
  for (auto i : idx.train) train.readings.push_back(dataset.readings[i]);
  for (auto i : idx.test) test.readings.push_back(dataset.readings[i]);
  return {std::move(train), std::move(test)};
}

}  // namespace aerolens

#endif  // AEROLENS_SPLIT_HPP_
