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

#include "elreluwl/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "elreluwl/error.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {

std::size_t NetworkConfig::max_width() const {
  return filter_widths.empty() ? 0
                               : *std::max_element(filter_widths.begin(), filter_widths.end());
}

void Validate(const NetworkConfig& c) {
  if (c.filter_widths.empty()) Fail(ErrorKind::kInvalidArgument, "no filter widths");
  std::set<std::size_t> seen;
  for (std::size_t w : c.filter_widths) {
    if (w == 0) Fail(ErrorKind::kInvalidArgument, "filter widths must be positive");
    if (!seen.insert(w).second) {
      Fail(ErrorKind::kInvalidArgument, "duplicate filter width " + std::to_string(w));
    }
  }
  if (c.maps_per_width < 1) Fail(ErrorKind::kInvalidArgument, "maps_per_width must be >= 1");
  if (c.embedding_dim < 1) Fail(ErrorKind::kInvalidArgument, "embedding_dim must be >= 1");
  if (c.num_classes < 2) Fail(ErrorKind::kInvalidArgument, "num_classes must be >= 2");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "dropout rate must lie in [0, 1)");
  }
  if (HasBranchPoint(c.activation) && c.activation.kind != ActivationKind::kLeakyRelu &&
      !(c.activation.a > 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "activation parameter a must be positive");
  }
}

ModelParams ModelParams::Zeros(const NetworkConfig& config) {
  Validate(config);
  ModelParams p;
  p.config = config;
  for (std::size_t w : config.filter_widths) {
    p.banks.push_back({w, Matrix(config.maps_per_width, w * config.embedding_dim),
                       std::vector<double>(config.maps_per_width, 0.0)});
  }
  p.fc_weights = Matrix(config.num_classes, config.feature_count());
  p.fc_bias.assign(config.num_classes, 0.0);
  return p;
}

namespace {

std::string BankName(const FilterBank& bank) {
  return "conv[width=" + std::to_string(bank.width) + "]";
}

bool Finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void ModelParams::CheckConsistent() const {
  Validate(config);
  const std::size_t d = config.embedding_dim;
  if (banks.size() != config.filter_widths.size()) {
    Fail(ErrorKind::kData, "model has " + std::to_string(banks.size()) +
                               " filter banks, config expects " +
                               std::to_string(config.filter_widths.size()));
  }
  for (std::size_t b = 0; b < banks.size(); ++b) {
    const FilterBank& bank = banks[b];
    if (bank.width != config.filter_widths[b] || bank.weights.rows() != config.maps_per_width ||
        bank.weights.cols() != bank.width * d || bank.bias.size() != config.maps_per_width) {
      Fail(ErrorKind::kData, BankName(bank) + " shape does not match the config");
    }
    if (!Finite(bank.weights.flat()) || !Finite(bank.bias)) {
      Fail(ErrorKind::kData, BankName(bank) + " has non-finite entries");
    }
  }
  if (fc_weights.rows() != config.num_classes || fc_weights.cols() != config.feature_count() ||
      fc_bias.size() != config.num_classes) {
    Fail(ErrorKind::kData, "fc layer shape does not match the config");
  }
  if (!Finite(fc_weights.flat()) || !Finite(fc_bias)) {
    Fail(ErrorKind::kData, "fc layer has non-finite entries");
  }
}

ModelParams InitParams(const NetworkConfig& config) {
  ModelParams p = ModelParams::Zeros(config);
  Rng rng(MixSeed(config.seed, 0x1417));
  auto glorot = [&](Matrix& m, double fan_in, double fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (double& v : m.flat()) v = rng.Uniform(-bound, bound);
  };
  for (FilterBank& bank : p.banks) {
    glorot(bank.weights, static_cast<double>(bank.width * config.embedding_dim),
           static_cast<double>(config.maps_per_width));
  }
  glorot(p.fc_weights, static_cast<double>(config.feature_count()),
         static_cast<double>(config.num_classes));
  return p;
}

std::vector<double> ConvForward(std::span<const double> filter, std::size_t width, double bias,
                                const Matrix& sentence, const Activation& activation) {
  const std::size_t d = sentence.cols();
  if (width == 0 || filter.size() != width * d) {
    Fail(ErrorKind::kInvalidArgument, "filter shape does not match the sentence width");
  }
  if (sentence.rows() < width) {
    Fail(ErrorKind::kInvalidArgument, "sentence has " + std::to_string(sentence.rows()) +
                                          " rows, shorter than filter width " +
                                          std::to_string(width));
  }
  const std::size_t positions = sentence.rows() - width + 1;
  std::vector<double> out(positions);
  const double* base = sentence.flat().data();
  for (std::size_t t = 0; t < positions; ++t) {
    out[t] = Activate(activation, Dot(filter.data(), base + t * d, width * d) + bias);
  }
  return out;
}

PoolResult MaxPool(std::span<const double> feature_map) {
  if (feature_map.empty()) Fail(ErrorKind::kInvalidArgument, "max-pool over an empty map");
  PoolResult r{feature_map[0], 0};
  for (std::size_t i = 1; i < feature_map.size(); ++i) {
    if (feature_map[i] > r.value) r = {feature_map[i], i};
  }
  return r;
}

std::size_t ArgMax(std::span<const double> values) { return MaxPool(values).argmax; }

void Forward(const ModelParams& params, const Matrix& sentence, ForwardMode mode,
             ForwardTrace& trace) {
  const NetworkConfig& cfg = params.config;
  const std::size_t d = cfg.embedding_dim;
  if (sentence.cols() != d) {
    Fail(ErrorKind::kInvalidArgument, "sentence width " + std::to_string(sentence.cols()) +
                                          " does not match embedding_dim " + std::to_string(d));
  }
  if (sentence.rows() < cfg.max_width()) {
    Fail(ErrorKind::kInvalidArgument, "sentence shorter than the widest filter");
  }
  trace.sentence = sentence;
  const std::size_t maps = cfg.maps_per_width;
  const std::size_t features = cfg.feature_count();
  trace.pre_activations.resize(params.banks.size());
  trace.activations.resize(params.banks.size());
  trace.argmax.assign(features, 0);
  trace.pooled.assign(features, 0.0);
  const double* base = sentence.flat().data();

  for (std::size_t b = 0; b < params.banks.size(); ++b) {
    const FilterBank& bank = params.banks[b];
    const std::size_t positions = sentence.rows() - bank.width + 1;
    const std::size_t span = bank.width * d;
    Matrix& pre = trace.pre_activations[b];
    Matrix& act = trace.activations[b];
    if (pre.rows() != maps || pre.cols() != positions) {
      pre = Matrix(maps, positions);
      act = Matrix(maps, positions);
    }
    for (std::size_t t = 0; t < positions; ++t) {
      const double* window = base + t * d;
      for (std::size_t j = 0; j < maps; ++j) {
        const double x = Dot(bank.weights.row(j).data(), window, span) + bank.bias[j];
        pre(j, t) = x;
        act(j, t) = Activate(cfg.activation, x);
      }
    }
    for (std::size_t j = 0; j < maps; ++j) {
      const PoolResult pool = MaxPool(act.row(j));
      trace.pooled[b * maps + j] = pool.value;
      trace.argmax[b * maps + j] = pool.argmax;
    }
  }

  trace.mask.assign(features, 1.0);
  if (mode.train) {
    Rng rng(mode.dropout_seed);
    const double keep = 1.0 - cfg.dropout;
    const double scale = 1.0 / keep;
    for (double& m : trace.mask) m = rng.Bernoulli(keep) ? scale : 0.0;
  }
  trace.features.resize(features);
  for (std::size_t i = 0; i < features; ++i) trace.features[i] = trace.pooled[i] * trace.mask[i];

  trace.logits.resize(cfg.num_classes);
  for (std::size_t c = 0; c < cfg.num_classes; ++c) {
    trace.logits[c] =
        Dot(params.fc_weights.row(c).data(), trace.features.data(), features) + params.fc_bias[c];
  }
  trace.probs = Softmax(trace.logits);
}

ForwardTrace Forward(const ModelParams& params, const Matrix& sentence, ForwardMode mode) {
  ForwardTrace trace;
  Forward(params, sentence, mode, trace);
  return trace;
}

void SetZero(Gradients& grads) {
  for (FilterBank& bank : grads.banks) {
    bank.weights.Fill(0.0);
    std::fill(bank.bias.begin(), bank.bias.end(), 0.0);
  }
  grads.fc_weights.Fill(0.0);
  std::fill(grads.fc_bias.begin(), grads.fc_bias.end(), 0.0);
}

void AccumulateGradients(const ModelParams& params, const ForwardTrace& trace,
                         std::size_t target, double w, Gradients& acc) {
  const NetworkConfig& cfg = params.config;
  if (target >= cfg.num_classes) {
    Fail(ErrorKind::kInvalidArgument, "target class out of range");
  }
  const std::size_t k = cfg.num_classes;
  const std::size_t features = cfg.feature_count();
  const std::size_t maps = cfg.maps_per_width;
  const std::size_t d = cfg.embedding_dim;

  // d loss / d logits for unit weight.
  std::vector<double> dz(trace.probs);
  dz[target] -= 1.0;

  for (std::size_t c = 0; c < k; ++c) {
    auto grow = acc.fc_weights.row(c);
    for (std::size_t i = 0; i < features; ++i) grow[i] += w * (dz[c] * trace.features[i]);
    acc.fc_bias[c] += w * dz[c];
  }

  const double* base = trace.sentence.flat().data();
  for (std::size_t b = 0; b < params.banks.size(); ++b) {
    const std::size_t width = params.banks[b].width;
    const std::size_t span = width * d;
    FilterBank& gbank = acc.banks[b];
    for (std::size_t j = 0; j < maps; ++j) {
      const std::size_t f = b * maps + j;
      if (trace.mask[f] == 0.0) continue;
      double dfeature = 0.0;
      for (std::size_t c = 0; c < k; ++c) dfeature += params.fc_weights(c, f) * dz[c];
      const std::size_t t = trace.argmax[f];
      const double dpre =
          dfeature * trace.mask[f] * ActivationGrad(cfg.activation, trace.pre_activations[b](j, t));
      if (dpre == 0.0) continue;
      const double* window = base + t * d;
      auto grow = gbank.weights.row(j);
      for (std::size_t i = 0; i < span; ++i) grow[i] += w * (dpre * window[i]);
      gbank.bias[j] += w * dpre;
    }
  }
}

Gradients Backward(const ModelParams& params, const ForwardTrace& trace, std::size_t target,
                   double sample_weight) {
  Gradients g = ModelParams::Zeros(params.config);
  AccumulateGradients(params, trace, target, sample_weight, g);
  return g;
}

void ApplySgdStep(ModelParams& params, const Gradients& grads, double lr) {
  if (grads.banks.size() != params.banks.size() ||
      grads.fc_weights.size() != params.fc_weights.size() ||
      grads.fc_bias.size() != params.fc_bias.size()) {
    Fail(ErrorKind::kInvalidArgument, "gradient shape does not match the parameters");
  }
  for (std::size_t b = 0; b < grads.banks.size(); ++b) {
    const FilterBank& g = grads.banks[b];
    if (g.weights.size() != params.banks[b].weights.size() ||
        g.bias.size() != params.banks[b].bias.size()) {
      Fail(ErrorKind::kInvalidArgument, "gradient shape does not match " + BankName(g));
    }
    if (!Finite(g.weights.flat())) Fail(ErrorKind::kNumeric, "non-finite gradient in " + BankName(g) + ".weights");
    if (!Finite(g.bias)) Fail(ErrorKind::kNumeric, "non-finite gradient in " + BankName(g) + ".bias");
  }
  if (!Finite(grads.fc_weights.flat())) Fail(ErrorKind::kNumeric, "non-finite gradient in fc.weights");
  if (!Finite(grads.fc_bias)) Fail(ErrorKind::kNumeric, "non-finite gradient in fc.bias");

  auto step = [lr](std::span<double> theta, std::span<const double> g) {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * g[i];
  };
  for (std::size_t b = 0; b < grads.banks.size(); ++b) {
    step(params.banks[b].weights.flat(), grads.banks[b].weights.flat());
    step(params.banks[b].bias, grads.banks[b].bias);
  }
  step(params.fc_weights.flat(), grads.fc_weights.flat());
  step(params.fc_bias, grads.fc_bias);
}

ModelParams SgdStep(const ModelParams& params, const Gradients& grads, double lr) {
  ModelParams next = params;
  ApplySgdStep(next, grads, lr);
  return next;
}

Prediction Predict(const ModelParams& params, const Matrix& sentence) {
  ForwardTrace trace = Forward(params, sentence, ForwardMode::Eval());
  return {ArgMax(trace.probs), std::move(trace.probs)};
}

}  // namespace elreluwl
