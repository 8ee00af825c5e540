// Copyright 2026 The elreluwl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ELRELUWL_REPORT_HPP_
#define ELRELUWL_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "elreluwl/metrics.hpp"
#include "elreluwl/training.hpp"

namespace elreluwl {

struct TrainRun {
  std::string dataset;
  TrainReport report;
  bool operator==(const TrainRun&) const = default;
};

struct CvRun {
  std::string dataset;
  CvReport report;
  bool operator==(const CvRun&) const = default;
};

struct ComparisonRun {
  std::string dataset;
  ComparisonReport report;
  bool operator==(const ComparisonRun&) const = default;
};

struct EvalRun {
  std::string dataset;
  std::string preset;
  EvalResult overall;
  std::vector<StratumResult> strata;
  std::optional<TimingStats> timing;
  bool operator==(const EvalRun&) const = default;
};

using ReportItem = std::variant<TrainRun, CvRun, ComparisonRun, EvalRun>;

/// Writes metrics.csv, summary.csv and report.md into `out_dir` (created if
/// missing) and returns their paths. Throws kInvalidArgument on an empty list
/// before touching the filesystem.
std::vector<std::filesystem::path> EmitReport(std::span<const ReportItem> items,
                                              const std::filesystem::path& out_dir);

// 12 significant digits, '.' decimal separator, independent of locale.
std::string FormatNumber(double value);

}  // namespace elreluwl

#endif  // ELRELUWL_REPORT_HPP_
