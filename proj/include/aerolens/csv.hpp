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

#ifndef AEROLENS_CSV_HPP_
#define AEROLENS_CSV_HPP_

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "aerolens/error.hpp"
#include "aerolens/types.hpp"

namespace aerolens {

inline constexpr std::string_view kReadingsCsvHeader =
    "timestamp,no2_ppb,voc_ppb,pm10_ugm3,pm25_ugm3,pm1_ugm3,activity,person_id";

namespace detail {

inline std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline std::string FormatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// Reads the readings schema. Empty pollutant cells become nulls (NaN) and
// are left for preprocess() to drop. The result is stably sorted by time.
inline Dataset ParseReadingsCsv(std::istream& in, std::string source_tag = {}) {
  Dataset dataset;
  dataset.source_tag = std::move(source_tag);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!header_seen) {
      if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        line.erase(0, 3);
      }
      if (line != kReadingsCsvHeader) {
        throw Error(Errc::kMissingHeader,
                    "expected header '" + std::string(kReadingsCsvHeader) + "'", row);
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    const auto cells = detail::SplitCsvLine(line);
    if (cells.size() != 8) {
      throw Error(Errc::kBadRow,
                  "row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                      " cells, expected 8",
                  row);
    }
    Reading reading;
    const auto ts = ParseTimestamp(cells[0]);
    if (!ts) {
      throw Error(Errc::kBadTimestamp,
                  "row " + std::to_string(row) + ": '" + std::string(cells[0]) + "'", row);
    }
    reading.timestamp = *ts;
    for (std::size_t p = 0; p < kPollutantCount; ++p) {
      const std::string_view cell = cells[p + 1];
      if (cell.empty()) {
        reading.pollutants.values[p] = kNullValue;
        continue;
      }
      double v = 0.0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw Error(Errc::kBadNumber,
                    "row " + std::to_string(row) + ", column " + std::to_string(p + 2) + ": '" +
                        std::string(cell) + "'",
                    row, p + 2);
      }
      reading.pollutants.values[p] = v;
    }
    if (!cells[6].empty()) {
      const auto activity = ParseActivity(cells[6]);
      if (!activity) {
        throw Error(Errc::kBadActivity,
                    "row " + std::to_string(row) + ": '" + std::string(cells[6]) + "'", row);
      }
      reading.activity = *activity;
    }
    if (!cells[7].empty()) reading.person_id = std::string(cells[7]);
    dataset.readings.push_back(std::move(reading));
  }
  if (!header_seen) throw Error(Errc::kMissingHeader, "empty input", 1);
  std::stable_sort(dataset.readings.begin(), dataset.readings.end(),
                   [](const Reading& a, const Reading& b) { return a.timestamp < b.timestamp; });
  return dataset;
}

inline Dataset ParseReadingsCsv(std::string_view text, std::string source_tag = {}) {
  std::istringstream in{std::string(text)};
  return ParseReadingsCsv(in, std::move(source_tag));
}

// Shortest round-trip decimal for every number; nulls as empty cells.
inline void WriteReadingsCsv(std::ostream& out, const Dataset& dataset) {
  out << kReadingsCsvHeader << '\n';
  for (const auto& r : dataset.readings) {
    out << FormatTimestamp(r.timestamp);
    for (double v : r.pollutants.values) {
      out << ',';
      if (!std::isnan(v)) out << detail::FormatNumber(v);
    }
    out << ',';
    if (r.activity) out << ActivityName(*r.activity);
    out << ',';
    if (r.person_id) out << *r.person_id;
    out << '\n';
  }
}

inline std::string ToCsv(const Dataset& dataset) {
  std::ostringstream out;
  WriteReadingsCsv(out, dataset);
  return out.str();
}

}  // namespace aerolens

#endif  // AEROLENS_CSV_HPP_
