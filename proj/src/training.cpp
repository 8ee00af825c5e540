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

#include "elreluwl/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "elreluwl/error.hpp"
#include "elreluwl/log.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {

std::string_view LossModeName(LossMode mode) {
  return mode == LossMode::kWeighted ? "weighted" : "unweighted";
}

LossMode ParseLossMode(std::string_view name) {
  if (name == "weighted") return LossMode::kWeighted;
  if (name == "unweighted") return LossMode::kUnweighted;
  Fail(ErrorKind::kInvalidArgument, "unknown loss mode '" + std::string(name) + "'");
}

void Validate(const TrainConfig& c) {
  Validate(c.network);
  if (c.batch_size < 1) Fail(ErrorKind::kInvalidArgument, "batch_size must be >= 1");
  if (c.max_epochs < 1) Fail(ErrorKind::kInvalidArgument, "max_epochs must be >= 1");
  if (!(c.learning_rate > 0.0)) Fail(ErrorKind::kInvalidArgument, "learning_rate must be positive");
  if (!(c.convergence.epsilon >= 0.0)) Fail(ErrorKind::kInvalidArgument, "epsilon must be >= 0");
  if (c.convergence.patience < 1) Fail(ErrorKind::kInvalidArgument, "patience must be >= 1");
  if (!(c.validation_fraction > 0.0 && c.validation_fraction < 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "validation_fraction must lie in (0, 1)");
  }
}

TrainConfig BaselineSotaPreset(std::size_t embedding_dim) {
  TrainConfig c;
  c.name = std::string(kBaselinePreset);
  c.network.filter_widths = {2, 3, 4};
  c.network.maps_per_width = 2;
  c.network.embedding_dim = embedding_dim;
  c.network.dropout = 0.4;
  c.network.activation = {ActivationKind::kSigmoid, kDefaultInflection};
  c.loss = LossMode::kUnweighted;
  return c;
}

TrainConfig ElreluwlPreset(std::size_t embedding_dim) {
  TrainConfig c;
  c.name = std::string(kElreluwlPreset);
  c.network.filter_widths = {3, 4, 5};
  c.network.maps_per_width = 100;
  c.network.embedding_dim = embedding_dim;
  c.network.dropout = 0.4;
  c.network.activation = {ActivationKind::kModifiedLeakyReluContinuous, kDefaultInflection};
  c.loss = LossMode::kWeighted;
  return c;
}

TrainConfig PresetByName(std::string_view name, std::size_t embedding_dim) {
  if (name == kBaselinePreset) return BaselineSotaPreset(embedding_dim);
  if (name == kElreluwlPreset) return ElreluwlPreset(embedding_dim);
  Fail(ErrorKind::kInvalidArgument, "unknown preset '" + std::string(name) + "'");
}

std::size_t ConvergenceEpoch(std::span<const double> history, double epsilon,
                             std::size_t patience) {
  if (history.empty()) return 0;
  double best = history[0];
  std::size_t best_epoch = 1;
  std::size_t stale = 0;
  for (std::size_t e = 1; e < history.size(); ++e) {
    if (history[e] > best + epsilon) {
      best = history[e];
      best_epoch = e + 1;
      stale = 0;
    } else if (++stale >= patience) {
      break;
    }
  }
  return best_epoch;
}

double Mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double SampleStdDev(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

namespace {

using Clock = std::chrono::steady_clock;

double ElapsedMs(Clock::time_point start, bool record) {
  if (!record) return 0.0;
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct EncodedSet {
  std::vector<std::vector<std::size_t>> tokens;
  std::vector<int> labels;
};

EncodedSet Encode(const LabeledDataset& dataset, const std::vector<std::size_t>& indices,
                  const Vocabulary& vocab) {
  EncodedSet out;
  for (std::size_t i : indices) {
    out.tokens.push_back(vocab.Encode(dataset[i].tokens));
    out.labels.push_back(dataset[i].label);
  }
  return out;
}

double Accuracy(const ModelParams& params, const EmbeddingTable& table, const EncodedSet& set) {
  if (set.labels.empty()) return 0.0;
  Matrix sentence;
  ForwardTrace trace;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    EmbedIndices(table, set.tokens[i], params.config.max_width(), sentence);
    Forward(params, sentence, ForwardMode::Eval(), trace);
    if (static_cast<int>(ArgMax(trace.probs)) == set.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.labels.size());
}

}  // namespace

TrainResult Train(const LabeledDataset& dataset, const Embeddings& embeddings,
                  const TrainConfig& config) {
  Validate(config);
  if (dataset.k() < 2) {
    Fail(ErrorKind::kData, "training needs both classes; dataset has " +
                               std::to_string(dataset.k()));
  }
  if (embeddings.table.rows() != embeddings.vocab.size()) {
    Fail(ErrorKind::kInvalidArgument, "embedding table does not match its vocabulary");
  }
  if (embeddings.table.dim() != config.network.embedding_dim) {
    Fail(ErrorKind::kInvalidArgument,
         "embedding dim " + std::to_string(embeddings.table.dim()) +
             " does not match network embedding_dim " +
             std::to_string(config.network.embedding_dim));
  }
  const auto run_start = Clock::now();

  auto [train_idx, val_idx] =
      StratifiedHoldout(dataset, config.validation_fraction, MixSeed(config.seed, 11));
  const LabeledDataset train_part = dataset.Subset(train_idx);
  const ClassWeights weights = config.loss == LossMode::kWeighted
                                   ? ComputeClassWeights(train_part)
                                   : UniformWeights();
  const EncodedSet train_set = Encode(dataset, train_idx, embeddings.vocab);
  const EncodedSet val_set = Encode(dataset, val_idx, embeddings.vocab);

  NetworkConfig net = config.network;
  net.seed = MixSeed(config.seed, 3);
  ModelParams params = InitParams(net);
  ModelParams best_params = params;
  Gradients grads = ModelParams::Zeros(net);

  TrainReport report;
  report.preset = config.name;
  report.class_weights = weights;
  report.train_size = train_idx.size();
  report.validation_size = val_idx.size();
  report.seed = config.seed;

  std::vector<std::size_t> order(train_set.labels.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> val_history;
  double best = 0.0;
  std::size_t stale = 0;
  Matrix sentence;
  ForwardTrace trace;
  const std::size_t min_rows = net.max_width();

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto epoch_start = Clock::now();
    Rng shuffle_rng(MixSeed(config.seed, 1000 + epoch));
    shuffle_rng.Shuffle(std::span<std::size_t>(order));
    const std::uint64_t dropout_base = MixSeed(config.seed, 2000 + epoch);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      ++batch_no;
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      SetZero(grads);
      double batch_loss = 0.0;
      const std::string where =
          "epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch_no);
      try {
        for (std::size_t pos = start; pos < stop; ++pos) {
          const std::size_t s = order[pos];
          const auto target = static_cast<std::size_t>(train_set.labels[s]);
          const double w = weights[train_set.labels[s]];
          EmbedIndices(embeddings.table, train_set.tokens[s], min_rows, sentence);
          Forward(params, sentence, ForwardMode::Train(MixSeed(dropout_base, pos)), trace);
          batch_loss += CrossEntropy(trace.probs, target, w);
          if (ArgMax(trace.probs) == target) ++correct;
          AccumulateGradients(params, trace, target, w, grads);
        }
      } catch (const Error& e) {
        Fail(e.kind(), std::string(e.what()) + " in " + where);
      }
      if (!std::isfinite(batch_loss)) Fail(ErrorKind::kNumeric, "non-finite loss in " + where);
      loss_sum += batch_loss;
      try {
        ApplySgdStep(params, grads, config.learning_rate);
      } catch (const Error& e) {
        Fail(e.kind(), std::string(e.what()) + " in " + where);
      }
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    rec.validation_accuracy = Accuracy(params, embeddings.table, val_set);
    rec.ms = ElapsedMs(epoch_start, config.record_timing);
    report.history.push_back(rec);
    val_history.push_back(rec.validation_accuracy);

    // Same rule as ConvergenceEpoch, applied online.
    if (epoch == 1 || rec.validation_accuracy > best + config.convergence.epsilon) {
      best = rec.validation_accuracy;
      best_params = params;
      stale = 0;
    } else if (++stale >= config.convergence.patience) {
      report.stopped_early = epoch < config.max_epochs;
      break;
    }
  }

  report.convergence_epoch =
      ConvergenceEpoch(val_history, config.convergence.epsilon, config.convergence.patience);
  report.best_validation_accuracy = *std::max_element(val_history.begin(), val_history.end());
  report.total_ms = ElapsedMs(run_start, config.record_timing);
  return {std::move(best_params), std::move(report)};
}

CvReport RunFoldCv(const LabeledDataset& dataset, const Embeddings& embeddings,
                   const TrainConfig& config, std::size_t k_folds, std::uint64_t seed) {
  const FoldPlan plan = KFoldSplit(dataset, k_folds, seed);
  CvReport cv;
  cv.preset = config.name;
  cv.k_folds = k_folds;
  cv.seed = seed;
  std::vector<double> acc, macro, epochs;
  for (std::size_t f = 0; f < k_folds; ++f) {
    TrainConfig fold_config = config;
    fold_config.seed = MixSeed(config.seed, 500 + f);
    const LabeledDataset train = dataset.Subset(plan.TrainIndices(f));
    const LabeledDataset test = dataset.Subset(plan.TestIndices(f));
    TrainResult result = Train(train, embeddings, fold_config);
    FoldResult fold{std::move(result.report), Evaluate(result.params, embeddings, test)};
    acc.push_back(fold.test.accuracy);
    macro.push_back(fold.test.macro_accuracy());
    epochs.push_back(static_cast<double>(fold.train.convergence_epoch));
    cv.folds.push_back(std::move(fold));
    LogInfo("fold " + std::to_string(f + 1) + "/" + std::to_string(k_folds) + " accuracy " +
            std::to_string(acc.back()));
  }
  cv.mean_accuracy = Mean(acc);
  cv.std_accuracy = SampleStdDev(acc);
  cv.mean_macro_accuracy = Mean(macro);
  cv.mean_convergence_epoch = Mean(epochs);
  cv.std_convergence_epoch = SampleStdDev(epochs);
  return cv;
}

ComparisonReport CompareRuns(const LabeledDataset& dataset, const Embeddings& embeddings,
                             const TrainConfig& baseline, const TrainConfig& proposed,
                             std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) Fail(ErrorKind::kInvalidArgument, "compare needs at least one seed");
  Validate(baseline);
  Validate(proposed);
  ComparisonReport report;
  report.baseline_name = baseline.name;
  report.proposed_name = proposed.name;
  report.minority_class =
      dataset.count(kPositive) <= dataset.count(kNegative) ? kPositive : kNegative;
  const auto minority = static_cast<std::size_t>(report.minority_class);

  for (std::uint64_t seed : seeds) {
    const FoldPlan plan = KFoldSplit(dataset, 5, seed);
    const LabeledDataset train = dataset.Subset(plan.TrainIndices(0));
    const LabeledDataset test = dataset.Subset(plan.TestIndices(0));
    auto run = [&](TrainConfig config) {
      config.seed = seed;
      TrainResult r = Train(train, embeddings, config);
      return RunOutcome{std::move(r.report), Evaluate(r.params, embeddings, test)};
    };
    PairedRun pair{seed, run(baseline), run(proposed)};
    const double ab = pair.baseline.test.accuracy, ap = pair.proposed.test.accuracy;
    const std::size_t eb = pair.baseline.train.convergence_epoch;
    const std::size_t ep = pair.proposed.train.convergence_epoch;
    const double mb = pair.baseline.test.per_class_accuracy[minority];
    const double mp = pair.proposed.test.per_class_accuracy[minority];
    report.accuracy_wins += ap > ab;
    report.accuracy_ties += ap == ab;
    report.convergence_wins += ep < eb;
    report.convergence_ties += ep == eb;
    report.minority_accuracy_wins += mp > mb;
    report.minority_accuracy_ties += mp == mb;
    report.runs.push_back(std::move(pair));
  }
  return report;
}

}  // namespace elreluwl
