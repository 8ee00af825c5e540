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

#include "elreluwl/functions.hpp"

#include <algorithm>
#include <cmath>

#include "elreluwl/error.hpp"

namespace elreluwl {
namespace {

void CheckInput(const Activation& act, double x) {
  if (!std::isfinite(x)) Fail(ErrorKind::kInvalidArgument, "activation input is not finite");
  if (HasBranchPoint(act) && act.kind != ActivationKind::kLeakyRelu && !(act.a > 0.0)) {
    Fail(ErrorKind::kInvalidArgument, "activation parameter a must be positive");
  }
}

}  // namespace

std::string_view ActivationName(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kSigmoid: return "sigmoid";
    case ActivationKind::kLeakyRelu: return "lrelu";
    case ActivationKind::kDisplacedRelu: return "drelu";
    case ActivationKind::kModifiedLeakyReluLiteral: return "mlrelu-literal";
    case ActivationKind::kModifiedLeakyReluContinuous: return "mlrelu-continuous";
  }
  return "unknown";
}

ActivationKind ParseActivationKind(std::string_view name) {
  for (ActivationKind kind : kAllActivationKinds) {
    if (ActivationName(kind) == name) return kind;
  }
  Fail(ErrorKind::kInvalidArgument, "unknown activation '" + std::string(name) + "'");
}

bool HasBranchPoint(const Activation& act) { return act.kind != ActivationKind::kSigmoid; }

double BranchPoint(const Activation& act) {
  return act.kind == ActivationKind::kLeakyRelu ? 0.0 : -act.a;
}

double Activate(const Activation& act, double x) {
  CheckInput(act, x);
  const double a = act.a;
  switch (act.kind) {
    case ActivationKind::kSigmoid:
      if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
      return std::exp(x) / (1.0 + std::exp(x));
    case ActivationKind::kLeakyRelu:
      return x > 0 ? x : kLeakySlope * x;
    case ActivationKind::kDisplacedRelu:
      return x > -a ? x : -a;
    case ActivationKind::kModifiedLeakyReluLiteral:
      return x > -a ? x : -a * x;
    case ActivationKind::kModifiedLeakyReluContinuous:
      return x > -a ? x : a * (x + a) - a;
  }
  return x;
}

double ActivationGrad(const Activation& act, double x) {
  CheckInput(act, x);
  const double a = act.a;
  switch (act.kind) {
    case ActivationKind::kSigmoid: {
      const double e = std::exp(-std::abs(x));
      return e / ((1.0 + e) * (1.0 + e));
    }
    case ActivationKind::kLeakyRelu:
      return x >= 0 ? 1.0 : kLeakySlope;
    case ActivationKind::kDisplacedRelu:
      return x >= -a ? 1.0 : 0.0;
    case ActivationKind::kModifiedLeakyReluLiteral:
      return x >= -a ? 1.0 : -a;
    case ActivationKind::kModifiedLeakyReluContinuous:
      return x >= -a ? 1.0 : a;
  }
  return 1.0;
}

std::vector<double> Softmax(std::span<const double> logits) {
  if (logits.empty()) Fail(ErrorKind::kInvalidArgument, "softmax of an empty vector");
  double max = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) Fail(ErrorKind::kNumeric, "softmax input is not finite");
    max = std::max(max, z);
  }
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return out;
}

ClassWeights UniformWeights() {
  ClassWeights w;
  w.weight.fill(1.0);
  return w;
}

ClassWeights ComputeClassWeights(const std::array<std::size_t, kNumLabels>& counts) {
  std::size_t n = 0, k = 0;
  for (std::size_t c : counts) {
    n += c;
    if (c > 0) ++k;
  }
  if (k == 0) Fail(ErrorKind::kInvalidArgument, "class weights need at least one class");
  ClassWeights w;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    if (counts[c] > 0) {
      w.weight[c] = static_cast<double>(n) /
                    (static_cast<double>(k) * static_cast<double>(counts[c]));
    }
  }
  return w;
}

ClassWeights ComputeClassWeights(const LabeledDataset& dataset) {
  return ComputeClassWeights(dataset.class_counts());
}

double CrossEntropy(std::span<const double> probs, std::size_t target, double weight) {
  if (target >= probs.size()) {
    Fail(ErrorKind::kInvalidArgument, "target class " + std::to_string(target) +
                                          " out of range for " +
                                          std::to_string(probs.size()) + " classes");
  }
  if (!(weight > 0.0)) Fail(ErrorKind::kInvalidArgument, "sample weight must be positive");
  return -weight * std::log(std::max(probs[target], kLogClamp));
}

}  // namespace elreluwl
