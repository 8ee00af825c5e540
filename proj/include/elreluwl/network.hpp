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

#ifndef ELRELUWL_NETWORK_HPP_
#define ELRELUWL_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elreluwl/functions.hpp"
#include "elreluwl/matrix.hpp"

namespace elreluwl {

struct NetworkConfig {
  std::vector<std::size_t> filter_widths{3, 4, 5};
  std::size_t maps_per_width = 100;
  std::size_t embedding_dim = 200;
  std::size_t num_classes = 2;
  double dropout = 0.4;
  Activation activation;
  std::uint64_t seed = 1;

  std::size_t max_width() const;
  // Length of the pooled feature vector.
  std::size_t feature_count() const { return filter_widths.size() * maps_per_width; }

  bool operator==(const NetworkConfig&) const = default;
};

void Validate(const NetworkConfig& config);

/// Filters of one width. Row j of `weights` is map j's width x dim filter,
/// flattened row-major, so it lines up with `width` consecutive rows of a
/// row-major sentence matrix.
struct FilterBank {
  std::size_t width = 0;
  Matrix weights;             // maps x (width * dim)
  std::vector<double> bias;   // maps

  bool operator==(const FilterBank&) const = default;
};

struct ModelParams {
  NetworkConfig config;
  std::vector<FilterBank> banks;  // in filter_widths order
  Matrix fc_weights;              // num_classes x feature_count
  std::vector<double> fc_bias;    // num_classes

  // All-zero parameters shaped for `config`.
  static ModelParams Zeros(const NetworkConfig& config);

  // Throws kData if shapes disagree with `config` or entries are non-finite.
  void CheckConsistent() const;

  bool operator==(const ModelParams&) const = default;
};

// Gradients share the parameter layout.
using Gradients = ModelParams;

/// Glorot-uniform filters and FC weights, zero biases.
ModelParams InitParams(const NetworkConfig& config);

/// One feature map: activation(<sentence[t .. t+width), filter> + bias) for
/// t in [0, L - width]. `filter` is width x dim flattened row-major.
std::vector<double> ConvForward(std::span<const double> filter, std::size_t width, double bias,
                                const Matrix& sentence, const Activation& activation);

struct PoolResult {
  double value;
  std::size_t argmax;  // first index attaining the maximum
};

PoolResult MaxPool(std::span<const double> feature_map);

struct ForwardMode {
  bool train = false;
  std::uint64_t dropout_seed = 0;

  static ForwardMode Eval() { return {}; }
  static ForwardMode Train(std::uint64_t seed) { return {true, seed}; }
};

struct ForwardTrace {
  Matrix sentence;
  std::vector<Matrix> pre_activations;  // per bank: maps x positions
  std::vector<Matrix> activations;      // per bank: maps x positions
  std::vector<std::size_t> argmax;      // per feature, bank-major
  std::vector<double> pooled;           // per feature
  std::vector<double> mask;             // per feature: 0 or 1/(1-p); all 1 in eval
  std::vector<double> features;         // pooled * mask
  std::vector<double> logits;
  std::vector<double> probs;
};

ForwardTrace Forward(const ModelParams& params, const Matrix& sentence, ForwardMode mode);
// Buffer-reusing variant.
void Forward(const ModelParams& params, const Matrix& sentence, ForwardMode mode,
             ForwardTrace& trace);

/// Exact gradient of sample_weight * cross-entropy for the sample in `trace`.
/// Embeddings are inputs, not parameters.
Gradients Backward(const ModelParams& params, const ForwardTrace& trace, std::size_t target,
                   double sample_weight);

// acc += Backward(params, trace, target, sample_weight), without allocating.
void AccumulateGradients(const ModelParams& params, const ForwardTrace& trace,
                         std::size_t target, double sample_weight, Gradients& acc);

void SetZero(Gradients& grads);

/// Returns params - learning_rate * grads. Throws kNumeric naming the block
/// holding a non-finite gradient entry.
ModelParams SgdStep(const ModelParams& params, const Gradients& grads, double learning_rate);
void ApplySgdStep(ModelParams& params, const Gradients& grads, double learning_rate);

struct Prediction {
  std::size_t label = 0;
  std::vector<double> probs;
};

// Smallest index on an exact tie.
std::size_t ArgMax(std::span<const double> values);

Prediction Predict(const ModelParams& params, const Matrix& sentence);

}  // namespace elreluwl

#endif  // ELRELUWL_NETWORK_HPP_
