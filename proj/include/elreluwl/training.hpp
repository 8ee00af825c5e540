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

#ifndef ELRELUWL_TRAINING_HPP_
#define ELRELUWL_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elreluwl/corpus.hpp"
#include "elreluwl/embedding.hpp"
#include "elreluwl/functions.hpp"
#include "elreluwl/metrics.hpp"
#include "elreluwl/network.hpp"

namespace elreluwl {

enum class LossMode { kUnweighted, kWeighted };

std::string_view LossModeName(LossMode mode);
LossMode ParseLossMode(std::string_view name);

struct ConvergenceRule {
  double epsilon = 0.001;  // minimum improvement of the best validation accuracy
  std::size_t patience = 3;

  bool operator==(const ConvergenceRule&) const = default;
};

struct TrainConfig {
  std::string name = "custom";
  NetworkConfig network;
  LossMode loss = LossMode::kWeighted;
  // Applied to the batch loss, which is a sum over samples: 0.2 / batch_size.
  double learning_rate = 0.002;
  std::size_t batch_size = 100;
  std::size_t max_epochs = 30;
  ConvergenceRule convergence;
  double validation_fraction = 0.2;
  std::uint64_t seed = 1;
  // When false all wall-clock fields are reported as 0.
  bool record_timing = true;

  bool operator==(const TrainConfig&) const = default;
};

void Validate(const TrainConfig& config);

inline constexpr std::string_view kBaselinePreset = "baseline-sota";
inline constexpr std::string_view kElreluwlPreset = "elreluwl";

/// Sigmoid, unweighted loss, widths 2/3/4 with 2 maps each.
TrainConfig BaselineSotaPreset(std::size_t embedding_dim);
/// Modified leaky ReLU (continuous, a = 0.03), class-weighted loss, widths
/// 3/4/5 with 100 maps each.
TrainConfig ElreluwlPreset(std::size_t embedding_dim);
TrainConfig PresetByName(std::string_view name, std::size_t embedding_dim);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;       // mean per-sample (weighted) cross-entropy
  double train_accuracy = 0.0;   // training-mode predictions during the epoch
  double validation_accuracy = 0.0;
  double ms = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainReport {
  std::string preset;
  std::vector<EpochRecord> history;
  std::size_t convergence_epoch = 0;  // 1-based
  double best_validation_accuracy = 0.0;
  bool stopped_early = false;
  ClassWeights class_weights;
  std::size_t train_size = 0;
  std::size_t validation_size = 0;
  std::uint64_t seed = 0;
  double total_ms = 0.0;

  bool operator==(const TrainReport&) const = default;
};

struct TrainResult {
  ModelParams params;  // from the convergence epoch
  TrainReport report;
};

/// Epoch (1-based) of the running best validation accuracy, where only gains
/// larger than `epsilon` count; the scan stops once `patience` consecutive
/// epochs fail to improve.
std::size_t ConvergenceEpoch(std::span<const double> validation_accuracy, double epsilon,
                             std::size_t patience);

/// Build-in stratified validation split, class weights from the training
/// part only, per-epoch seeded shuffle with batched SGD, best-epoch params.
TrainResult Train(const LabeledDataset& dataset, const Embeddings& embeddings,
                  const TrainConfig& config);

struct FoldResult {
  TrainReport train;
  EvalResult test;

  bool operator==(const FoldResult&) const = default;
};

struct CvReport {
  std::string preset;
  std::size_t k_folds = 0;
  std::uint64_t seed = 0;
  std::vector<FoldResult> folds;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation
  double mean_macro_accuracy = 0.0;
  double mean_convergence_epoch = 0.0;
  double std_convergence_epoch = 0.0;

  bool operator==(const CvReport&) const = default;
};

CvReport RunFoldCv(const LabeledDataset& dataset, const Embeddings& embeddings,
                   const TrainConfig& config, std::size_t k_folds, std::uint64_t seed);

struct RunOutcome {
  TrainReport train;
  EvalResult test;

  bool operator==(const RunOutcome&) const = default;
};

struct PairedRun {
  std::uint64_t seed = 0;
  RunOutcome baseline;
  RunOutcome proposed;

  bool operator==(const PairedRun&) const = default;
};

struct ComparisonReport {
  std::string baseline_name;
  std::string proposed_name;
  int minority_class = kPositive;
  std::vector<PairedRun> runs;
  // Proposed strictly better / equal, per metric.
  std::size_t accuracy_wins = 0;
  std::size_t accuracy_ties = 0;
  std::size_t convergence_wins = 0;  // fewer epochs
  std::size_t convergence_ties = 0;
  std::size_t minority_accuracy_wins = 0;
  std::size_t minority_accuracy_ties = 0;

  bool operator==(const ComparisonReport&) const = default;
};

/// For each seed both configs train on the same split (one fold of a seeded
/// stratified 5-fold plan is held out for testing).
ComparisonReport CompareRuns(const LabeledDataset& dataset, const Embeddings& embeddings,
                             const TrainConfig& baseline, const TrainConfig& proposed,
                             std::span<const std::uint64_t> seeds);

double Mean(std::span<const double> values);
double SampleStdDev(std::span<const double> values);

}  // namespace elreluwl

#endif  // ELRELUWL_TRAINING_HPP_
