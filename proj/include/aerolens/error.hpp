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

#ifndef AEROLENS_ERROR_HPP_
#define AEROLENS_ERROR_HPP_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace aerolens {

enum class Errc {
  kMissingHeader,
  kBadTimestamp,
  kBadNumber,
  kBadRow,
  kBadActivity,
  kEmptyDataset,
  kBadProfile,
  kOverlappingSegments,
  kTooFewPoints,
  kDimensionMismatch,
  kSingleCluster,
  kEmptyInput,
  kSingleClass,
  kSchemaVersionMismatch,
  kCorruptDocument,
  kEmptyBackground,
  kDegeneratePerturbations,
  kAllZeroImportances,
  kInvalidImportance,
  kEmptyCluster,
  kNoTrackedPollutants,
  kLengthMismatch,
  kNonPositiveRaw,
  kWindowLargerThanData,
  kInvalidArgument,
  kConfig,
  kIo,
};

inline std::string_view ErrcName(Errc code) {
  switch (code) {
    case Errc::kMissingHeader:
      return "MissingHeader";
    case Errc::kBadTimestamp:
      return "BadTimestamp";
    case Errc::kBadNumber:
      return "BadNumber";
    case Errc::kBadRow:
      return "BadRow";
    case Errc::kBadActivity:
      return "BadActivity";
    case Errc::kEmptyDataset:
      return "EmptyDataset";
    case Errc::kBadProfile:
      return "BadProfile";
    case Errc::kOverlappingSegments:
      return "OverlappingSegments";
    case Errc::kTooFewPoints:
      return "TooFewPoints";
    case Errc::kDimensionMismatch:
      return "DimensionMismatch";
    case Errc::kSingleCluster:
      return "SingleCluster";
    case Errc::kEmptyInput:
      return "EmptyInput";
    case Errc::kSingleClass:
      return "SingleClass";
    case Errc::kSchemaVersionMismatch:
      return "SchemaVersionMismatch";
    case Errc::kCorruptDocument:
      return "CorruptDocument";
    case Errc::kEmptyBackground:
      return "EmptyBackground";
    case Errc::kDegeneratePerturbations:
      return "DegeneratePerturbations";
    case Errc::kAllZeroImportances:
      return "AllZeroImportances";
    case Errc::kInvalidImportance:
      return "InvalidImportance";
    case Errc::kEmptyCluster:
      return "EmptyCluster";
    case Errc::kNoTrackedPollutants:
      return "NoTrackedPollutants";
    case Errc::kLengthMismatch:
      return "LengthMismatch";
    case Errc::kNonPositiveRaw:
      return "NonPositiveRaw";
    case Errc::kWindowLargerThanData:
      return "WindowLargerThanData";
    case Errc::kInvalidArgument:
      return "InvalidArgument";
    case Errc::kConfig:
      return "ConfigError";
    case Errc::kIo:
      return "IoError";
  }
  return "Unknown";
}

// Every failure raised by the library. `row` is a 1-based line number for
// ingestion errors; `index` carries a cluster or column position where the
// error names one.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message, std::optional<std::size_t> row = std::nullopt,
        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(ErrcName(code)) + ": " + message),
        code_(code),
        row_(row),
        index_(index) {}

  Errc code() const { return code_; }
  std::optional<std::size_t> row() const { return row_; }
  std::optional<std::size_t> index() const { return index_; }

 private:
  Errc code_;
  std::optional<std::size_t> row_;
  std::optional<std::size_t> index_;
};

}  // namespace aerolens

#endif  // AEROLENS_ERROR_HPP_
