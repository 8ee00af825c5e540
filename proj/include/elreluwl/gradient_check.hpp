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

#ifndef ELRELUWL_GRADIENT_CHECK_HPP_
#define ELRELUWL_GRADIENT_CHECK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "elreluwl/functions.hpp"
#include "elreluwl/network.hpp"

namespace elreluwl {

struct GradCheckOptions {
  // Shape of the random models; activation is replaced per checked kind.
  NetworkConfig network{{2}, 2, 3, 2, 0.25, {}, 0};
  std::vector<ActivationKind> kinds{kAllActivationKinds.begin(), kAllActivationKinds.end()};
  double a = kDefaultInflection;
  std::size_t trials = 100;  // accepted fixtures per kind
  std::size_t sentence_len = 4;
  double h = 1e-5;
  double tol = 1e-4;
  // Denominator floor for the relative error of near-zero gradient entries.
  double floor = 1e-6;
  // Fixtures with a pre-activation this close to a branch point, or a
  // max-pool winner this close to the runner-up, are skipped.
  double boundary_margin = 1e-4;
  std::uint64_t seed = 1;
  // Applied to each analytic gradient before comparison; used to verify the
  // checker catches corrupted gradients.
  std::function<void(Gradients&)> mutate;
};

struct BlockError {
  std::string block;
  double max_rel_error = 0.0;
  bool flagged = false;

  bool operator==(const BlockError&) const = default;
};

struct KindCheck {
  ActivationKind kind = ActivationKind::kSigmoid;
  std::size_t trials = 0;
  std::size_t skipped = 0;
  std::vector<BlockError> blocks;

  double max_rel_error() const;
  bool operator==(const KindCheck&) const = default;
};

struct GradCheckReport {
  double h = 0.0;
  double tol = 0.0;
  std::vector<KindCheck> kinds;

  std::size_t flagged_blocks() const;
  bool passed() const { return flagged_blocks() == 0; }
  bool operator==(const GradCheckReport&) const = default;
};

/// Compares Backward against central differences of the weighted loss on
/// random tiny models, per parameter block.
GradCheckReport GradientCheck(const GradCheckOptions& options);

}  // namespace elreluwl

#endif  // ELRELUWL_GRADIENT_CHECK_HPP_
