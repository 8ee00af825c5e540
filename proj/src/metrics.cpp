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

#include "elreluwl/metrics.hpp"

#include <algorithm>
#include <chrono>

#include "elreluwl/error.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {

double EvalResult::macro_accuracy() const {
  double total = 0.0;
  std::size_t classes = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (class_counts[c] > 0) {
      total += per_class_accuracy[c];
      ++classes;
    }
  }
  return classes == 0 ? 0.0 : total / static_cast<double>(classes);
}

EvalResult Score(std::span<const int> labels, std::span<const int> predicted,
                 std::span<const double> true_probability) {
  if (labels.size() != predicted.size() ||
      (!true_probability.empty() && true_probability.size() != labels.size())) {
    Fail(ErrorKind::kInvalidArgument, "label and prediction counts differ");
  }
  EvalResult r;
  r.n_evaluated = labels.size();
  std::array<std::size_t, kNumLabels> correct{};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    const int p = predicted[i];
    ++r.class_counts.at(y);
    if (y == p) ++correct[y];
    if (y == kPositive) {
      (p == kPositive ? r.confusion.tp : r.confusion.fn)++;
    } else {
      (p == kPositive ? r.confusion.fp : r.confusion.tn)++;
    }
  }
  if (r.n_evaluated > 0) {
    r.accuracy = static_cast<double>(r.confusion.tp + r.confusion.tn) /
                 static_cast<double>(r.n_evaluated);
  }
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (r.class_counts[c] > 0) {
      r.per_class_accuracy[c] =
          static_cast<double>(correct[c]) / static_cast<double>(r.class_counts[c]);
    }
  }
  if (!true_probability.empty() && r.n_evaluated > 0) {
    double s = 0.0;
    for (double p : true_probability) s += p;
    r.mean_true_probability = s / static_cast<double>(r.n_evaluated);
  }
  return r;
}

namespace {

struct Predictions {
  std::vector<int> labels;
  std::vector<int> predicted;
  std::vector<double> true_probability;
};

Predictions PredictAll(const ModelParams& params, const Embeddings& emb,
                       const LabeledDataset& dataset, std::span<const std::size_t> indices) {
  Predictions out;
  Matrix sentence;
  ForwardTrace trace;
  const std::size_t min_rows = params.config.max_width();
  for (std::size_t i : indices) {
    const Document& doc = dataset[i];
    EmbedIndices(emb.table, emb.vocab.Encode(doc.tokens), min_rows, sentence);
    Forward(params, sentence, ForwardMode::Eval(), trace);
    out.labels.push_back(doc.label);
    out.predicted.push_back(static_cast<int>(ArgMax(trace.probs)));
    out.true_probability.push_back(trace.probs[static_cast<std::size_t>(doc.label)]);
  }
  return out;
}

}  // namespace

EvalResult Evaluate(const ModelParams& params, const Embeddings& embeddings,
                    const LabeledDataset& dataset) {
  if (dataset.empty()) Fail(ErrorKind::kInvalidArgument, "cannot evaluate an empty dataset");
  std::vector<std::size_t> all(dataset.n());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Predictions p = PredictAll(params, embeddings, dataset, all);
  return Score(p.labels, p.predicted, p.true_probability);
}

std::vector<StratumResult> StratifiedSampleEval(const ModelParams& params,
                                                const Embeddings& embeddings,
                                                const LabeledDataset& dataset,
                                                std::size_t strata, std::size_t per_stratum,
                                                std::uint64_t seed) {
  if (strata == 0 || per_stratum == 0) {
    Fail(ErrorKind::kInvalidArgument, "strata and per_stratum must be positive");
  }
  std::vector<StratumResult> results;
  for (int label : {kNegative, kPositive}) {
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < dataset.n(); ++i) {
      if (dataset[i].label == label) pool.push_back(i);
    }
    if (pool.size() < strata * per_stratum) {
      Fail(ErrorKind::kData, std::string("class ") +
                                 (label == kPositive ? "positive" : "negative") + " has " +
                                 std::to_string(pool.size()) + " documents, need " +
                                 std::to_string(strata * per_stratum));
    }
    Rng rng(MixSeed(seed, 300 + static_cast<std::uint64_t>(label)));
    rng.Shuffle(std::span<std::size_t>(pool));
    for (std::size_t s = 0; s < strata; ++s) {
      StratumResult r;
      r.label = label;
      r.stratum = s;
      r.members.assign(pool.begin() + static_cast<std::ptrdiff_t>(s * per_stratum),
                       pool.begin() + static_cast<std::ptrdiff_t>((s + 1) * per_stratum));
      const Predictions p = PredictAll(params, embeddings, dataset, r.members);
      r.result = Score(p.labels, p.predicted, p.true_probability);
      results.push_back(std::move(r));
    }
  }
  return results;
}

TimingStats SummarizeTimings(std::vector<double> samples) {
  TimingStats stats;
  if (samples.empty()) return stats;
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  stats.measurements = n;
  stats.min_ms = samples.front();
  stats.max_ms = samples.back();
  stats.median_ms = n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
  double total = 0.0;
  for (double s : samples) total += s;
  stats.mean_ms = total / static_cast<double>(n);
  return stats;
}

TimingStats MeasureInferenceTime(const ModelParams& params, const Embeddings& embeddings,
                                 const std::vector<Document>& samples, std::size_t warmup,
                                 std::size_t repeats) {
  if (samples.empty()) Fail(ErrorKind::kInvalidArgument, "no samples to time");
  if (repeats < 1) Fail(ErrorKind::kInvalidArgument, "repeats must be >= 1");
  using Clock = std::chrono::steady_clock;
  const std::size_t min_rows = params.config.max_width();
  auto run_one = [&](const Document& doc) {
    const Matrix sentence = EmbedLookup(embeddings.vocab, embeddings.table, doc.tokens, min_rows);
    return Predict(params, sentence).label;
  };
  std::size_t sink = 0;
  for (std::size_t i = 0; i < warmup; ++i) sink += run_one(samples[i % samples.size()]);
  std::vector<double> ms;
  ms.reserve(repeats * samples.size());
  for (std::size_t r = 0; r < repeats; ++r) {
    for (const Document& doc : samples) {
      const auto start = Clock::now();
      sink += run_one(doc);
      const auto stop = Clock::now();
      ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
    }
  }
  [[maybe_unused]] volatile std::size_t keep_alive = sink;
  return SummarizeTimings(std::move(ms));
}

PairedTiming MeasurePairedInferenceTime(const ModelParams& baseline, const ModelParams& proposed,
                                        const Embeddings& embeddings,
                                        const std::vector<Document>& samples,
                                        std::size_t warmup, std::size_t repeats) {
  PairedTiming t;
  t.baseline = MeasureInferenceTime(baseline, embeddings, samples, warmup, repeats);
  t.proposed = MeasureInferenceTime(proposed, embeddings, samples, warmup, repeats);
  t.median_ratio = t.baseline.median_ms > 0.0 ? t.proposed.median_ms / t.baseline.median_ms : 0.0;
  return t;
}

}  // namespace elreluwl
