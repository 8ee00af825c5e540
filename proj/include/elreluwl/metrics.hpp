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

#ifndef ELRELUWL_METRICS_HPP_
#define ELRELUWL_METRICS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "elreluwl/corpus.hpp"
#include "elreluwl/embedding.hpp"
#include "elreluwl/network.hpp"

namespace elreluwl {

// Label 1 is the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + tn + fp + fn; }
  bool operator==(const Confusion&) const = default;
};

struct EvalResult {
  std::size_t n_evaluated = 0;
  double accuracy = 0.0;  // (TP + TN) / n
  // Correct within class / count(class); 0 for classes with no samples.
  std::array<double, kNumLabels> per_class_accuracy{};
  std::array<std::size_t, kNumLabels> class_counts{};
  Confusion confusion;
  // Mean predicted probability of the true class.
  double mean_true_probability = 0.0;

  double macro_accuracy() const;
  bool operator==(const EvalResult&) const = default;
};

/// Builds an EvalResult from labels and predictions.
EvalResult Score(std::span<const int> labels, std::span<const int> predicted,
                 std::span<const double> true_probability = {});

EvalResult Evaluate(const ModelParams& params, const Embeddings& embeddings,
                    const LabeledDataset& dataset);

struct StratumResult {
  int label = 0;
  std::size_t stratum = 0;               // 0-based within the class
  std::vector<std::size_t> members;      // dataset indices
  EvalResult result;

  bool operator==(const StratumResult&) const = default;
};

/// For each class draws `strata` disjoint seeded groups of `per_stratum`
/// documents and evaluates each group on its own.
std::vector<StratumResult> StratifiedSampleEval(const ModelParams& params,
                                                const Embeddings& embeddings,
                                                const LabeledDataset& dataset,
                                                std::size_t strata, std::size_t per_stratum,
                                                std::uint64_t seed);

struct TimingStats {
  std::size_t measurements = 0;
  double median_ms = 0.0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;

  bool operator==(const TimingStats&) const = default;
};

// Order statistics of raw millisecond samples.
TimingStats SummarizeTimings(std::vector<double> samples_ms);

/// Per-document predict latency on a monotonic clock. The first `warmup`
/// calls are discarded; then every document is timed `repeats` times.
TimingStats MeasureInferenceTime(const ModelParams& params, const Embeddings& embeddings,
                                 const std::vector<Document>& samples, std::size_t warmup,
                                 std::size_t repeats);

struct PairedTiming {
  TimingStats baseline;
  TimingStats proposed;
  double median_ratio = 0.0;  // proposed / baseline; 0 when the baseline median is 0
};

// Times both models on the same samples, one after the other.
PairedTiming MeasurePairedInferenceTime(const ModelParams& baseline, const ModelParams& proposed,
                                        const Embeddings& embeddings,
                                        const std::vector<Document>& samples,
                                        std::size_t warmup, std::size_t repeats);

}  // namespace elreluwl

#endif  // ELRELUWL_METRICS_HPP_
