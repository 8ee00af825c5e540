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

#ifndef ELRELUWL_FUNCTIONS_HPP_
#define ELRELUWL_FUNCTIONS_HPP_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elreluwl/corpus.hpp"

namespace elreluwl {

inline constexpr double kDefaultInflection = 0.03;
inline constexpr double kLeakySlope = 0.01;
inline constexpr double kLogClamp = 1e-12;

enum class ActivationKind {
  kSigmoid,
  kLeakyRelu,                 // x, or 0.01 x for x <= 0
  kDisplacedRelu,             // x, or -a for x <= -a
  kModifiedLeakyReluLiteral,  // x, or -a x for x <= -a
  kModifiedLeakyReluContinuous,  // x, or a (x + a) - a for x <= -a
};

struct Activation {
  ActivationKind kind = ActivationKind::kModifiedLeakyReluContinuous;
  double a = kDefaultInflection;  // ignored by sigmoid and leaky ReLU

  bool operator==(const Activation&) const = default;
};

inline constexpr std::array<ActivationKind, 5> kAllActivationKinds = {
    ActivationKind::kSigmoid, ActivationKind::kLeakyRelu, ActivationKind::kDisplacedRelu,
    ActivationKind::kModifiedLeakyReluLiteral,
    ActivationKind::kModifiedLeakyReluContinuous};

// "sigmoid", "lrelu", "drelu", "mlrelu-literal", "mlrelu-continuous".
std::string_view ActivationName(ActivationKind kind);
ActivationKind ParseActivationKind(std::string_view name);

// Piecewise kinds switch branches at this input; sigmoid has none.
bool HasBranchPoint(const Activation& act);
double BranchPoint(const Activation& act);

// Throws kInvalidArgument for non-finite x or a <= 0.
double Activate(const Activation& act, double x);

// Derivative of Activate. At the branch point the right-branch slope is used.
double ActivationGrad(const Activation& act, double x);

/// Max-subtracted softmax. Throws on an empty or non-finite input.
std::vector<double> Softmax(std::span<const double> logits);

struct ClassWeights {
  // Zero for classes absent from the data they were computed on.
  std::array<double, kNumLabels> weight{};

  double operator[](int label) const { return weight.at(static_cast<std::size_t>(label)); }
  bool operator==(const ClassWeights&) const = default;
};

// Unit weight for every class.
ClassWeights UniformWeights();

/// W(c) = n / (k * count(c)) over the classes present.
ClassWeights ComputeClassWeights(const std::array<std::size_t, kNumLabels>& counts);
ClassWeights ComputeClassWeights(const LabeledDataset& dataset);

/// -weight * log(max(probs[target], 1e-12)).
double CrossEntropy(std::span<const double> probs, std::size_t target, double weight = 1.0);

}  // namespace elreluwl

#endif  // ELRELUWL_FUNCTIONS_HPP_
