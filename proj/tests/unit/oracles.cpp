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


#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

namespace oracle {

using elreluwl::ActivationKind;
using elreluwl::Matrix;
using elreluwl::ModelParams;

double Act(ActivationKind kind, double a, double x) {
  switch (kind) {
    case ActivationKind::kSigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case ActivationKind::kLeakyRelu:
      return x > 0 ? x : 0.01 * x;
    case ActivationKind::kDisplacedRelu:
      return x > -a ? x : -a;
    case ActivationKind::kModifiedLeakyReluLiteral:
      return x > -a ? x : -a * x;
    case ActivationKind::kModifiedLeakyReluContinuous:
      return x > -a ? x : a * (x + a) - a;
  }
  return 0.0;
}

std::vector<double> NaiveSoftmax(const std::vector<double>& z) {
  double total = 0.0;
  for (double v : z) total += std::exp(v);
  std::vector<double> p;
  for (double v : z) p.push_back(std::exp(v) / total);
  return p;
}

NaiveBayes::NaiveBayes(const elreluwl::LabeledDataset& train) {
  std::map<std::string, std::size_t> index;
  for (const auto& d : train.documents()) {
    for (const auto& t : d.tokens) index.emplace(t, 0);
  }
  for (auto& [w, i] : index) {
    i = vocab_.size();
    vocab_.push_back(w);
  }
  const std::size_t v = vocab_.size();
  std::vector<std::vector<double>> counts(2, std::vector<double>(v, 0.0));
  std::vector<double> totals(2, 0.0), docs(2, 0.0);
  for (const auto& d : train.documents()) {
    docs[d.label] += 1.0;
    for (const auto& t : d.tokens) {
      counts[d.label][index.at(t)] += 1.0;
      totals[d.label] += 1.0;
    }
  }
  for (int c = 0; c < 2; ++c) {
    log_prior_.push_back(std::log(docs[c] / static_cast<double>(train.n())));
    std::vector<double> row;
    for (std::size_t i = 0; i < v; ++i) {
      row.push_back(std::log((counts[c][i] + 1.0) / (totals[c] + static_cast<double>(v) + 1.0)));
    }
    log_lik_.push_back(row);
    log_unknown_.push_back(std::log(1.0 / (totals[c] + static_cast<double>(v) + 1.0)));
  }
}

int NaiveBayes::Predict(const std::vector<std::string>& tokens) const {
  double best = -1e300;
  int label = 0;
  for (int c = 0; c < 2; ++c) {
    double s = log_prior_[c];
    for (const auto& t : tokens) {
      const auto it = std::lower_bound(vocab_.begin(), vocab_.end(), t);
      if (it != vocab_.end() && *it == t) {
        s += log_lik_[c][static_cast<std::size_t>(it - vocab_.begin())];
      } else {
        s += log_unknown_[c];
      }
    }
    if (s > best) {
      best = s;
      label = c;
    }
  }
  return label;
}

std::vector<double> NaiveProbs(const ModelParams& params, const Matrix& sentence,
                               const std::vector<double>& mask) {
  const auto& cfg = params.config;
  const std::size_t d = cfg.embedding_dim;
  std::vector<double> features;
  for (const auto& bank : params.banks) {
    const std::size_t w = bank.width;
    for (std::size_t j = 0; j < bank.weights.rows(); ++j) {
      double best = -1e300;
      for (std::size_t t = 0; t + w <= sentence.rows(); ++t) {
        double x = bank.bias[j];
        for (std::size_t r = 0; r < w; ++r) {
          for (std::size_t c = 0; c < d; ++c) x += bank.weights(j, r * d + c) * sentence(t + r, c);
        }
        best = std::max(best, Act(cfg.activation.kind, cfg.activation.a, x));
      }
      features.push_back(best * mask[features.size()]);
    }
  }
  std::vector<double> logits;
  for (std::size_t k = 0; k < cfg.num_classes; ++k) {
    double z = params.fc_bias[k];
    for (std::size_t f = 0; f < features.size(); ++f) z += params.fc_weights(k, f) * features[f];
    logits.push_back(z);
  }
  return NaiveSoftmax(logits);
}

double NaiveLoss(const ModelParams& params, const Matrix& sentence,
                 const std::vector<double>& mask, std::size_t target, double weight) {
  return -weight * std::log(NaiveProbs(params, sentence, mask)[target]);
}

namespace {

template <typename Fn>
void ForEachParam(ModelParams& p, Fn&& fn) {
  for (auto& bank : p.banks) {
    for (double& v : bank.weights.flat()) fn(v);
    for (double& v : bank.bias) fn(v);
  }
  for (double& v : p.fc_weights.flat()) fn(v);
  for (double& v : p.fc_bias) fn(v);
}

}  // namespace

ModelParams NumericGradient(const ModelParams& params, const Matrix& sentence,
                            const std::vector<double>& mask, std::size_t target, double weight,
                            double h) {
  ModelParams probe = params;
  ModelParams grad = ModelParams::Zeros(params.config);
  std::vector<double*> slots;
  ForEachParam(probe, [&](double& v) { slots.push_back(&v); });
  std::vector<double*> out;
  ForEachParam(grad, [&](double& v) { out.push_back(&v); });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double saved = *slots[i];
    *slots[i] = saved + h;
    const double up = NaiveLoss(probe, sentence, mask, target, weight);
    *slots[i] = saved - h;
    const double down = NaiveLoss(probe, sentence, mask, target, weight);
    *slots[i] = saved;
    *out[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

std::vector<double> Flatten(const ModelParams& p) {
  ModelParams copy = p;
  std::vector<double> flat;
  ForEachParam(copy, [&](double& v) { flat.push_back(v); });
  return flat;
}

Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix m(rows, cols);
  for (double& v : m.flat()) v = dist(gen);
  return m;
}

TempDir::TempDir(const std::string& tag) {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("elreluwl-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace oracle
