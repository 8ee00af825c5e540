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

#include "elreluwl/gradient_check.hpp"

#include <algorithm>
#include <cmath>

#include "elreluwl/error.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {

double KindCheck::max_rel_error() const {
  double m = 0.0;
  for (const BlockError& b : blocks) m = std::max(m, b.max_rel_error);
  return m;
}

std::size_t GradCheckReport::flagged_blocks() const {
  std::size_t n = 0;
  for (const KindCheck& k : kinds) {
    for (const BlockError& b : k.blocks) n += b.flagged;
  }
  return n;
}

namespace {

struct Block {
  std::string name;
  std::span<double> params;
  std::span<double> grads;
};

std::vector<Block> Blocks(ModelParams& p, Gradients& g) {
  std::vector<Block> out;
  for (std::size_t b = 0; b < p.banks.size(); ++b) {
    const std::string base = "conv[width=" + std::to_string(p.banks[b].width) + "]";
    out.push_back({base + ".weights", p.banks[b].weights.flat(), g.banks[b].weights.flat()});
    out.push_back({base + ".bias", p.banks[b].bias, g.banks[b].bias});
  }
  out.push_back({"fc.weights", p.fc_weights.flat(), g.fc_weights.flat()});
  out.push_back({"fc.bias", p.fc_bias, g.fc_bias});
  return out;
}

// True when a small parameter change could cross a kink of the loss.
bool NearKink(const ForwardTrace& trace, const Activation& act, double margin) {
  for (std::size_t b = 0; b < trace.pre_activations.size(); ++b) {
    const Matrix& pre = trace.pre_activations[b];
    const Matrix& out = trace.activations[b];
    if (HasBranchPoint(act)) {
      const double point = BranchPoint(act);
      for (double x : pre.flat()) {
        if (std::abs(x - point) < margin) return true;
      }
    }
    for (std::size_t j = 0; j < out.rows(); ++j) {
      const auto row = out.row(j);
      const std::size_t top = ArgMax(row);
      if (ActivationGrad(act, pre(j, top)) == 0.0) continue;  // flat branch: ties are harmless
      for (std::size_t t = 0; t < row.size(); ++t) {
        if (t != top && row[top] - row[t] < margin) return true;
      }
    }
  }
  return false;
}

}  // namespace

GradCheckReport GradientCheck(const GradCheckOptions& opt) {
  if (opt.trials < 1) Fail(ErrorKind::kInvalidArgument, "gradient check needs trials >= 1");
  if (!(opt.h > 0.0)) Fail(ErrorKind::kInvalidArgument, "finite-difference step must be positive");
  GradCheckReport report;
  report.h = opt.h;
  report.tol = opt.tol;
  Rng rng(opt.seed);

  for (ActivationKind kind : opt.kinds) {
    NetworkConfig cfg = opt.network;
    cfg.activation = {kind, opt.a};
    Validate(cfg);
    const std::size_t len = std::max(opt.sentence_len, cfg.max_width());
    KindCheck check;
    check.kind = kind;
    {
      ModelParams shape = ModelParams::Zeros(cfg);
      Gradients g = shape;
      for (const Block& b : Blocks(shape, g)) check.blocks.push_back({b.name, 0.0, false});
    }
    const std::size_t max_attempts = 50 * opt.trials;
    for (std::size_t attempt = 0; check.trials < opt.trials && attempt < max_attempts; ++attempt) {
      ModelParams params = ModelParams::Zeros(cfg);
      {
        Gradients scratch = params;
        for (Block& b : Blocks(params, scratch)) {
          for (double& v : b.params) v = rng.Uniform(-1.0, 1.0);
        }
      }
      Matrix sentence(len, cfg.embedding_dim);
      for (double& v : sentence.flat()) v = rng.Uniform(-1.0, 1.0);
      const std::size_t target = rng.Below(cfg.num_classes);
      const double weight = rng.Uniform(0.5, 2.0);
      const ForwardMode mode = ForwardMode::Train(rng.NextU64());

      const ForwardTrace trace = Forward(params, sentence, mode);
      if (NearKink(trace, cfg.activation, opt.boundary_margin)) {
        ++check.skipped;
        continue;
      }
      Gradients analytic = Backward(params, trace, target, weight);
      if (opt.mutate) opt.mutate(analytic);

      auto loss = [&](const ModelParams& p) {
        return CrossEntropy(Forward(p, sentence, mode).probs, target, weight);
      };
      std::vector<Block> blocks = Blocks(params, analytic);
      for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
        Block& block = blocks[bi];
        for (std::size_t i = 0; i < block.params.size(); ++i) {
          const double saved = block.params[i];
          block.params[i] = saved + opt.h;
          const double up = loss(params);
          block.params[i] = saved - opt.h;
          const double down = loss(params);
          block.params[i] = saved;
          const double numeric = (up - down) / (2.0 * opt.h);
          const double a = block.grads[i];
          const double denom = std::max({std::abs(a), std::abs(numeric), opt.floor});
          const double rel = std::abs(a - numeric) / denom;
          BlockError& err = check.blocks[bi];
          err.max_rel_error = std::max(err.max_rel_error, rel);
          if (rel > opt.tol) err.flagged = true;
        }
      }
      ++check.trials;
    }
    report.kinds.push_back(std::move(check));
  }
  return report;
}

}  // namespace elreluwl
