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


#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "elreluwl/error.hpp"
#include "elreluwl/network.hpp"
#include "elreluwl/rng.hpp"
#include "oracles.hpp"

using namespace elreluwl;

namespace {

NetworkConfig Tiny(ActivationKind kind, std::uint64_t seed, std::vector<std::size_t> widths = {2}) {
  NetworkConfig c;
  c.filter_widths = std::move(widths);
  c.maps_per_width = 2;
  c.embedding_dim = 3;
  c.dropout = 0.25;
  c.activation = {kind, kDefaultInflection};
  c.seed = seed;
  return c;
}

// Fixtures near a kink of the activation or a max-pool tie are not
// differentiable at the finite-difference scale.
bool NearKink(const ModelParams& p, const ForwardTrace& trace, double margin) {
  const Activation& act = p.config.activation;
  for (std::size_t b = 0; b < trace.pre_activations.size(); ++b) {
    const Matrix& pre = trace.pre_activations[b];
    const Matrix& post = trace.activations[b];
    for (std::size_t j = 0; j < pre.rows(); ++j) {
      auto row = post.row(j);
      std::vector<double> sorted(row.begin(), row.end());
      std::sort(sorted.rbegin(), sorted.rend());
      if (sorted.size() > 1 && sorted[0] - sorted[1] < margin) return true;
      if (!HasBranchPoint(act)) continue;
      for (double x : pre.row(j)) {
        if (std::abs(x - BranchPoint(act)) < margin) return true;
      }
    }
  }
  return false;
}

double MaxRelError(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace

TEST_CASE("init shapes, determinism, zero biases and the Glorot bound") {
  NetworkConfig c;
  c.embedding_dim = 20;
  const ModelParams p = InitParams(c);
  CHECK(p.fc_weights.rows() == 2);
  CHECK(p.fc_weights.cols() == 300);
  REQUIRE(p.banks.size() == 3);
  CHECK(InitParams(c) == p);
  c.seed = 2;
  CHECK_FALSE(InitParams(c) == p);
  for (const auto& bank : p.banks) {
    CHECK(bank.weights.rows() == 100);
    CHECK(bank.weights.cols() == bank.width * 20);
    for (double b : bank.bias) CHECK(b == 0.0);
    const double bound = std::sqrt(6.0 / (bank.width * 20.0 + 100.0));
    for (double w : bank.weights.flat()) CHECK(std::abs(w) <= bound);
  }
  for (double b : p.fc_bias) CHECK(b == 0.0);
  const double fc_bound = std::sqrt(6.0 / 302.0);
  for (double w : p.fc_weights.flat()) CHECK(std::abs(w) <= fc_bound);
  CHECK_NOTHROW(p.CheckConsistent());
}

TEST_CASE("config validation") {
  NetworkConfig c;
  c.filter_widths = {3, 3};
  CHECK_THROWS_AS(Validate(c), Error);
  c = NetworkConfig{};
  c.dropout = 1.0;
  CHECK_THROWS_AS(Validate(c), Error);
  c = NetworkConfig{};
  c.maps_per_width = 0;
  CHECK_THROWS_AS(Validate(c), Error);
  c = NetworkConfig{};
  c.filter_widths = {0};
  CHECK_THROWS_AS(Validate(c), Error);
  CHECK(NetworkConfig{}.max_width() == 5);
}

TEST_CASE("check consistent rejects mismatched shapes") {
  ModelParams p = InitParams(Tiny(ActivationKind::kSigmoid, 1));
  p.fc_bias.push_back(0.0);
  CHECK_THROWS_AS(p.CheckConsistent(), Error);
  p = InitParams(Tiny(ActivationKind::kSigmoid, 1));
  p.banks[0].weights(0, 0) = std::nan("");
  CHECK_THROWS_AS(p.CheckConsistent(), Error);
}

TEST_CASE("conv forward examples") {
  Matrix s(3, 2);
  s(0, 0) = 1; s(0, 1) = 2;
  s(1, 0) = 3; s(1, 1) = 4;
  s(2, 0) = 5; s(2, 1) = 6;
  const std::vector<double> ones(4, 1.0);
  const Activation mlrelu{ActivationKind::kModifiedLeakyReluContinuous, 0.03};
  CHECK(ConvForward(ones, 2, 0.0, s, mlrelu) == std::vector<double>{10, 18});
  const auto sig = ConvForward(ones, 2, 0.0, s, {ActivationKind::kSigmoid, 0.03});
  CHECK(sig[0] == doctest::Approx(0.9999546).epsilon(1e-7));
  CHECK(sig[1] == doctest::Approx(0.9999999).epsilon(1e-7));
  const auto zero = ConvForward(std::vector<double>(4, 0.0), 2, 0.0, s, mlrelu);
  CHECK(zero == std::vector<double>{0, 0});
  CHECK_THROWS_AS(ConvForward(std::vector<double>(8, 1.0), 4, 0.0, s, mlrelu), Error);
}

TEST_CASE("feature map length is L - w + 1") {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t w = 1 + rng.Below(5);
    const std::size_t len = w + rng.Below(10);
    const Matrix s = oracle::RandomMatrix(len, 3, rng.NextU64());
    const auto map = ConvForward(std::vector<double>(w * 3, 0.1), w, 0.0, s, {});
    CHECK(map.size() == len - w + 1);
  }
}

TEST_CASE("max pool") {
  const auto a = MaxPool(std::vector<double>{10, 18});
  CHECK(a.value == 18);
  CHECK(a.argmax == 1);
  const auto b = MaxPool(std::vector<double>{3, 3});
  CHECK(b.value == 3);
  CHECK(b.argmax == 0);
  CHECK_THROWS_AS(MaxPool(std::vector<double>{}), Error);

  Rng rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + rng.Below(20));
    for (double& x : v) x = static_cast<double>(rng.Below(7)) - 3.0;
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[best]) best = i;
    }
    const auto r = MaxPool(v);
    CHECK(r.value == v[best]);
    CHECK(r.argmax == best);
  }
}

TEST_CASE("forward agrees with the loop oracle") {
  Rng rng(12);
  for (ActivationKind kind : kAllActivationKinds) {
    for (int trial = 0; trial < 10; ++trial) {
      const ModelParams p = InitParams(Tiny(kind, rng.NextU64(), {2, 3}));
      const Matrix s = oracle::RandomMatrix(5, 3, rng.NextU64());
      const ForwardTrace eval = Forward(p, s, ForwardMode::Eval());
      const auto naive = oracle::NaiveProbs(p, s, std::vector<double>(4, 1.0));
      CHECK(eval.probs[0] == doctest::Approx(naive[0]).epsilon(1e-12));
      CHECK(std::abs(eval.probs[0] + eval.probs[1] - 1.0) <= 1e-12);
      CHECK(eval.pooled.size() == p.config.feature_count());

      const ForwardTrace train = Forward(p, s, ForwardMode::Train(rng.NextU64()));
      const auto masked = oracle::NaiveProbs(p, s, train.mask);
      CHECK(train.probs[1] == doctest::Approx(masked[1]).epsilon(1e-12));
      for (double m : train.mask) CHECK((m == 0.0 || m == doctest::Approx(1.0 / 0.75)));
    }
  }
}

TEST_CASE("forward modes") {
  NetworkConfig c = Tiny(ActivationKind::kModifiedLeakyReluContinuous, 3);
  const Matrix s = oracle::RandomMatrix(4, 3, 9);
  const ModelParams p = InitParams(c);
  const ForwardTrace t1 = Forward(p, s, ForwardMode::Train(77));
  const ForwardTrace t2 = Forward(p, s, ForwardMode::Train(77));
  CHECK(t1.mask == t2.mask);
  CHECK(t1.probs == t2.probs);
  CHECK(t1.features == t2.features);

  c.dropout = 0.0;
  const ModelParams q = InitParams(c);
  CHECK(Forward(q, s, ForwardMode::Train(5)).probs == Forward(q, s, ForwardMode::Eval()).probs);

  CHECK_THROWS_AS(Forward(p, oracle::RandomMatrix(4, 2, 1), ForwardMode::Eval()), Error);
  CHECK_THROWS_AS(Forward(p, oracle::RandomMatrix(1, 3, 1), ForwardMode::Eval()), Error);
}

TEST_CASE("inverted dropout preserves the expected features") {
  NetworkConfig c = Tiny(ActivationKind::kModifiedLeakyReluContinuous, 5, {2, 3});
  c.maps_per_width = 4;
  c.dropout = 0.4;
  ModelParams p = InitParams(c);
  for (auto& bank : p.banks) {
    for (double& b : bank.bias) b = 1.0;
  }
  const Matrix s = oracle::RandomMatrix(6, 3, 2, 0.0, 1.0);
  const ForwardTrace eval = Forward(p, s, ForwardMode::Eval());
  std::vector<double> mean(eval.features.size(), 0.0);
  ForwardTrace trace;
  const int masks = 100000;
  for (int i = 0; i < masks; ++i) {
    Forward(p, s, ForwardMode::Train(static_cast<std::uint64_t>(i)), trace);
    for (std::size_t f = 0; f < mean.size(); ++f) mean[f] += trace.features[f] / masks;
  }
  for (std::size_t f = 0; f < mean.size(); ++f) {
    REQUIRE(eval.features[f] > 0.05);
    CHECK(std::abs(mean[f] - eval.features[f]) <= 0.01 * eval.features[f]);
  }
}

TEST_CASE("backward matches central differences for every kind") {
  Rng rng(2024);
  for (ActivationKind kind : kAllActivationKinds) {
    int accepted = 0;
    while (accepted < 20) {
      const ModelParams p = InitParams(Tiny(kind, rng.NextU64()));
      const Matrix s = oracle::RandomMatrix(4, 3, rng.NextU64());
      const ForwardTrace trace = Forward(p, s, ForwardMode::Train(rng.NextU64()));
      if (NearKink(p, trace, 1e-4)) continue;
      const std::size_t target = rng.Below(2);
      const double weight = rng.Uniform(0.5, 2.0);
      const auto analytic = oracle::Flatten(Backward(p, trace, target, weight));
      const auto numeric =
          oracle::Flatten(oracle::NumericGradient(p, s, trace.mask, target, weight, 1e-5));
      INFO(ActivationName(kind));
      CHECK(MaxRelError(analytic, numeric) <= 1e-4);
      ++accepted;
    }
  }
}

TEST_CASE("backward is linear in the sample weight") {
  Rng rng(6);
  for (ActivationKind kind : kAllActivationKinds) {
    const ModelParams p = InitParams(Tiny(kind, rng.NextU64(), {2, 3}));
    const Matrix s = oracle::RandomMatrix(5, 3, rng.NextU64());
    const ForwardTrace trace = Forward(p, s, ForwardMode::Train(3));
    const auto one = oracle::Flatten(Backward(p, trace, 1, 1.0));
    const auto two = oracle::Flatten(Backward(p, trace, 1, 2.0));
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(two[i] == 2.0 * one[i]);
  }
}

TEST_CASE("accumulate gradients sums backward results") {
  const ModelParams p = InitParams(Tiny(ActivationKind::kLeakyRelu, 4));
  Gradients acc = ModelParams::Zeros(p.config);
  std::vector<double> expected(oracle::Flatten(acc).size(), 0.0);
  for (int i = 0; i < 5; ++i) {
    const Matrix s = oracle::RandomMatrix(4, 3, 100 + i);
    const ForwardTrace trace = Forward(p, s, ForwardMode::Train(i));
    AccumulateGradients(p, trace, i % 2, 1.5, acc);
    const auto g = oracle::Flatten(Backward(p, trace, i % 2, 1.5));
    for (std::size_t j = 0; j < g.size(); ++j) expected[j] += g[j];
  }
  const auto got = oracle::Flatten(acc);
  for (std::size_t j = 0; j < got.size(); ++j) CHECK(got[j] == doctest::Approx(expected[j]));
  SetZero(acc);
  for (double v : oracle::Flatten(acc)) CHECK(v == 0.0);
}

TEST_CASE("saturated sigmoid starves the filter gradient; modified leaky ReLU does not") {
  NetworkConfig c;
  c.filter_widths = {1};
  c.maps_per_width = 1;
  c.embedding_dim = 1;
  c.dropout = 0.0;
  auto filter_grad = [&](ActivationKind kind) {
    c.activation = {kind, kDefaultInflection};
    ModelParams p = ModelParams::Zeros(c);
    p.banks[0].weights(0, 0) = 1.0;
    p.fc_weights(0, 0) = 0.1;
    p.fc_weights(1, 0) = -0.1;
    Matrix s(1, 1, 50.0);
    const ForwardTrace trace = Forward(p, s, ForwardMode::Eval());
    CHECK(trace.pre_activations[0](0, 0) == 50.0);
    return std::abs(Backward(p, trace, 1, 1.0).banks[0].weights(0, 0));
  };
  CHECK(filter_grad(ActivationKind::kSigmoid) < 1e-20);
  CHECK(filter_grad(ActivationKind::kModifiedLeakyReluContinuous) > 1e-3);
}

TEST_CASE("sgd step") {
  NetworkConfig c = Tiny(ActivationKind::kSigmoid, 1);
  const ModelParams p = InitParams(c);
  Gradients g = InitParams(Tiny(ActivationKind::kSigmoid, 2));
  CHECK(SgdStep(p, g, 0.0) == p);

  NetworkConfig scalar;
  scalar.filter_widths = {1};
  scalar.maps_per_width = 1;
  scalar.embedding_dim = 1;
  ModelParams theta = ModelParams::Zeros(scalar);
  theta.fc_bias[0] = 1.0;
  Gradients gs = ModelParams::Zeros(scalar);
  gs.fc_bias[0] = 0.5;
  CHECK(SgdStep(theta, gs, 0.2).fc_bias[0] == doctest::Approx(0.9).epsilon(1e-15));

  const auto twice = oracle::Flatten(SgdStep(SgdStep(p, g, 0.125), g, 0.125));
  const auto once = oracle::Flatten(SgdStep(p, g, 0.25));
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i] == doctest::Approx(once[i]));

  ModelParams inplace = p;
  ApplySgdStep(inplace, g, 0.25);
  CHECK(oracle::Flatten(inplace) == once);

  g.banks[0].bias[1] = std::nan("");
  try {
    SgdStep(p, g, 0.1);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNumeric);
    CHECK(std::string(e.what()).find("conv[width=2].bias") != std::string::npos);
  }
  g = ModelParams::Zeros(c);
  g.fc_weights(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH(SgdStep(p, g, 0.1), doctest::Contains("fc.weights"));
}

TEST_CASE("argmax and predict break ties toward the smaller index") {
  CHECK(ArgMax(std::vector<double>{0.8, 0.2}) == 0);
  CHECK(ArgMax(std::vector<double>{0.5, 0.5}) == 0);
  CHECK(ArgMax(std::vector<double>{0.2, 0.8}) == 1);

  NetworkConfig c = Tiny(ActivationKind::kSigmoid, 1);
  const ModelParams zero = ModelParams::Zeros(c);
  const Matrix s = oracle::RandomMatrix(4, 3, 1);
  const Prediction tie = Predict(zero, s);
  CHECK(tie.label == 0);
  CHECK(tie.probs == std::vector<double>{0.5, 0.5});

  const ModelParams p = InitParams(c);
  const Prediction a = Predict(p, s);
  const Prediction b = Predict(p, s);
  CHECK(a.label == b.label);
  CHECK(a.probs == b.probs);
  CHECK(a.label == ArgMax(a.probs));
}
