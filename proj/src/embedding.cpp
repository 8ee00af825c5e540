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

#include "elreluwl/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "elreluwl/error.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {

Vocabulary::Vocabulary() : Vocabulary({std::string(kUnkToken)}, {0}) {}

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::size_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.empty() || words_[0] != kUnkToken) {
    Fail(ErrorKind::kData, "vocabulary must start with the UNK token");
  }
  if (counts_.size() != words_.size()) {
    Fail(ErrorKind::kData, "vocabulary counts do not match words");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      Fail(ErrorKind::kData, "duplicate vocabulary word '" + words_[i] + "'");
    }
  }
}

std::size_t Vocabulary::IndexOf(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnkIndex : it->second;
}

bool Vocabulary::Contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

std::vector<std::size_t> Vocabulary::Encode(const std::vector<std::string>& tokens) const {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(IndexOf(t));
  return out;
}

Vocabulary BuildVocab(const LabeledDataset& dataset, std::size_t min_count) {
  if (dataset.empty()) Fail(ErrorKind::kInvalidArgument, "cannot build a vocabulary from an empty dataset");
  std::map<std::string, std::size_t> freq;
  for (const Document& doc : dataset.documents()) {
    for (const auto& t : doc.tokens) ++freq[t];
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  std::size_t unk_count = 0;
  for (auto& [word, count] : freq) {
    if (count >= min_count && word != kUnkToken) {
      kept.emplace_back(word, count);
    } else {
      unk_count += count;
    }
  }
  if (kept.empty()) {
    Fail(ErrorKind::kData, "no word reaches min_count " + std::to_string(min_count));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;  // map order already breaks ties lexicographically
  });
  std::vector<std::string> words{std::string(kUnkToken)};
  std::vector<std::size_t> counts{unk_count};
  for (auto& [word, count] : kept) {
    words.push_back(std::move(word));
    counts.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

void Validate(const CbowConfig& c) {
  if (c.window < 1 || c.dim < 1 || c.negatives < 1 || c.epochs < 1 ||
      !(c.learning_rate > 0.0) || c.min_count < 1) {
    Fail(ErrorKind::kInvalidArgument,
         "CBOW window, dim, negatives, epochs, learning_rate and min_count must be positive");
  }
}

namespace {

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigma(x)) without overflow.
double LogLogistic(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

bool AllFinite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Cumulative unigram^0.75 distribution for negative sampling; UNK excluded.
std::vector<double> NoiseCdf(const Vocabulary& vocab) {
  std::vector<double> cdf(vocab.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 1; i < vocab.size(); ++i) {
    total += std::pow(static_cast<double>(vocab.Count(i)), 0.75);
    cdf[i] = total;
  }
  for (double& v : cdf) v /= total;
  return cdf;
}

std::size_t SampleNoise(const std::vector<double>& cdf, Rng& rng) {
  const double u = rng.Uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  std::size_t idx = static_cast<std::size_t>(it - cdf.begin());
  if (idx >= cdf.size()) idx = cdf.size() - 1;
  return std::max<std::size_t>(idx, 1);
}

}  // namespace

EmbeddingTable TrainCbow(const LabeledDataset& dataset, const Vocabulary& vocab,
                         const CbowConfig& config, std::vector<double>* objective) {
  Validate(config);
  std::vector<std::vector<std::size_t>> docs;
  docs.reserve(dataset.n());
  bool has_pair = false;
  for (const Document& doc : dataset.documents()) {
    docs.push_back(vocab.Encode(doc.tokens));
    if (doc.tokens.size() >= 2) has_pair = true;
  }
  if (!has_pair) {
    Fail(ErrorKind::kData, "CBOW needs at least one document with two or more tokens");
  }
  if (vocab.size() < 2) Fail(ErrorKind::kData, "CBOW needs a non-trivial vocabulary");

  const std::size_t d = config.dim;
  EmbeddingTable input = InitRandomEmbeddings(vocab, d, MixSeed(config.seed, 1));
  Matrix output(vocab.size(), d, 0.0);
  const std::vector<double> cdf = NoiseCdf(vocab);
  Rng rng(MixSeed(config.seed, 2));
  std::vector<double> hidden(d), hidden_grad(d);
  std::vector<std::size_t> context;
  const auto k = static_cast<std::ptrdiff_t>(config.window);
  if (objective) objective->clear();

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& doc : docs) {
      const auto len = static_cast<std::ptrdiff_t>(doc.size());
      for (std::ptrdiff_t t = 0; t < len; ++t) {
        const std::size_t target = doc[t];
        if (target == kUnkIndex) continue;
        context.clear();
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, t - k);
             j <= std::min(len - 1, t + k); ++j) {
          if (j != t && doc[j] != kUnkIndex) context.push_back(doc[j]);
        }
        if (context.empty()) continue;
        std::fill(hidden.begin(), hidden.end(), 0.0);
        for (std::size_t c : context) {
          const auto row = input.vectors.row(c);
          for (std::size_t i = 0; i < d; ++i) hidden[i] += row[i];
        }
        std::fill(hidden_grad.begin(), hidden_grad.end(), 0.0);
        double pair_loss = 0.0;
        for (std::size_t s = 0; s <= config.negatives; ++s) {
          std::size_t word = target;
          double label = 1.0;
          if (s > 0) {
            word = SampleNoise(cdf, rng);
            if (word == target) continue;
            label = 0.0;
          }
          auto out_row = output.row(word);
          const double score = Dot(hidden.data(), out_row.data(), d);
          pair_loss -= label > 0 ? LogLogistic(score) : LogLogistic(-score);
          const double g = config.learning_rate * (label - Logistic(score));
          for (std::size_t i = 0; i < d; ++i) {
            hidden_grad[i] += g * out_row[i];
            out_row[i] += g * hidden[i];
          }
        }
        for (std::size_t c : context) {
          auto row = input.vectors.row(c);
          for (std::size_t i = 0; i < d; ++i) row[i] += hidden_grad[i];
        }
        loss_sum += pair_loss;
        ++pairs;
      }
    }
    if (!AllFinite(input.vectors.flat()) || !AllFinite(output.flat())) {
      Fail(ErrorKind::kNumeric, "CBOW produced non-finite vectors in epoch " +
                                    std::to_string(epoch + 1));
    }
    if (objective) objective->push_back(loss_sum / static_cast<double>(pairs));
  }
  return input;
}

EmbeddingTable InitRandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                    std::uint64_t seed) {
  if (dim < 1) Fail(ErrorKind::kInvalidArgument, "embedding dim must be >= 1");
  EmbeddingTable table{Matrix(vocab.size(), dim)};
  Rng rng(seed);
  const double bound = 0.5 / static_cast<double>(dim);
  for (double& v : table.vectors.flat()) v = rng.Uniform(-bound, bound);
  return table;
}

void EmbedIndices(const EmbeddingTable& table, std::span<const std::size_t> indices,
                  std::size_t min_rows, Matrix& out) {
  if (indices.empty()) Fail(ErrorKind::kInvalidArgument, "cannot embed an empty token list");
  const std::size_t rows = std::max(indices.size(), min_rows);
  if (out.rows() != rows || out.cols() != table.dim()) out = Matrix(rows, table.dim());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= table.rows()) {
      Fail(ErrorKind::kInvalidArgument, "token index outside the embedding table");
    }
    const auto src = table.vectors.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  for (std::size_t i = indices.size(); i < rows; ++i) {
    auto r = out.row(i);
    std::fill(r.begin(), r.end(), 0.0);
  }
}

Matrix EmbedLookup(const Vocabulary& vocab, const EmbeddingTable& table,
                   const std::vector<std::string>& tokens, std::size_t min_rows) {
  if (tokens.empty()) Fail(ErrorKind::kInvalidArgument, "cannot embed an empty token list");
  if (table.rows() != vocab.size()) {
    Fail(ErrorKind::kInvalidArgument, "embedding table does not match the vocabulary");
  }
  Matrix out;
  const auto indices = vocab.Encode(tokens);
  EmbedIndices(table, indices, min_rows, out);
  return out;
}

double CosineSimilarity(std::span<const double> a, std::span<const double> b) {
  const double ab = Dot(a.data(), b.data(), a.size());
  const double aa = Dot(a.data(), a.data(), a.size());
  const double bb = Dot(b.data(), b.data(), b.size());
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / std::sqrt(aa * bb);
}

}  // namespace elreluwl
