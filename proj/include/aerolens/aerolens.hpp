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

#ifndef AEROLENS_AEROLENS_HPP_
#define AEROLENS_AEROLENS_HPP_

#include "aerolens/classifier.hpp"
#include "aerolens/clustering.hpp"
#include "aerolens/config.hpp"
#include "aerolens/csv.hpp"
#include "aerolens/error.hpp"
#include "aerolens/exposure.hpp"
#include "aerolens/generator.hpp"
#include "aerolens/lime.hpp"
#include "aerolens/matrix.hpp"
#include "aerolens/metrics.hpp"
#include "aerolens/naive_bayes.hpp"
#include "aerolens/pipeline.hpp"
#include "aerolens/potency.hpp"
#include "aerolens/preprocess.hpp"
#include "aerolens/random.hpp"
#include "aerolens/shapley.hpp"
#include "aerolens/split.hpp"
#include "aerolens/svm.hpp"
#include "aerolens/timeline.hpp"
#include "aerolens/tree.hpp"
#include "aerolens/types.hpp"
#include "aerolens/weights.hpp"

#endif  // AEROLENS_AEROLENS_HPP_
