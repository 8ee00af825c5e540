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

#ifndef ELRELUWL_EMBEDDING_HPP_
#define ELRELUWL_EMBEDDING_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "elreluwl/corpus.hpp"
#include "elreluwl/matrix.hpp"

namespace elreluwl {

inline constexpr std::size_t kUnkIndex = 0;
inline constexpr std::string_view kUnkToken = "<unk>";

/// Dense word index. Index 0 is always the unknown-word token.
class Vocabulary {
 public:
  Vocabulary();
  // `words[0]` must be kUnkToken; counts align with words.
  Vocabulary(std::vector<std::string> words, std::vector<std::size_t> counts);

  std::size_t size() const { return words_.size(); }
  // kUnkIndex for out-of-vocabulary words.
  std::size_t IndexOf(std::string_view word) const;
  bool Contains(std::string_view word) const;
  const std::string& Word(std::size_t index) const { return words_.at(index); }
  std::size_t Count(std::size_t index) const { return counts_.at(index); }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::size_t>& counts() const { return counts_; }

  std::vector<std::size_t> Encode(const std::vector<std::string>& tokens) const;

  bool operator==(const Vocabulary& other) const {
    return words_ == other.words_ && counts_ == other.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Orders words by (count desc, word asc); words below `min_count` fold into
/// UNK. Throws kData when no word reaches the threshold.
Vocabulary BuildVocab(const LabeledDataset& dataset, std::size_t min_count);

struct EmbeddingTable {
  Matrix vectors;  // |V| x dim

  std::size_t dim() const { return vectors.cols(); }
  std::size_t rows() const { return vectors.rows(); }
  bool operator==(const EmbeddingTable&) const = default;
};

struct CbowConfig {
  std::size_t window = 2;      // context half-width k
  std::size_t dim = 200;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
};

void Validate(const CbowConfig& config);

/// CBOW with negative sampling. The projection of a target position is the
/// sum of its (up to) 2k context vectors. If `objective` is given it receives
/// the mean per-pair negative log-likelihood of each epoch.
EmbeddingTable TrainCbow(const LabeledDataset& dataset, const Vocabulary& vocab,
                         const CbowConfig& config,
                         std::vector<double>* objective = nullptr);

/// Entries uniform in [-0.5/dim, 0.5/dim].
EmbeddingTable InitRandomEmbeddings(const Vocabulary& vocab, std::size_t dim,
                                    std::uint64_t seed);

/// Sentence matrix for `tokens`: one row per token (UNK row for unknown
/// words), zero rows appended up to `min_rows`.
Matrix EmbedLookup(const Vocabulary& vocab, const EmbeddingTable& table,
                   const std::vector<std::string>& tokens, std::size_t min_rows);

// Same, from pre-encoded indices, writing into `out` (resized as needed).
void EmbedIndices(const EmbeddingTable& table, std::span<const std::size_t> indices,
                  std::size_t min_rows, Matrix& out);

struct Embeddings {
  Vocabulary vocab;
  EmbeddingTable table;
};

double CosineSimilarity(std::span<const double> a, std::span<const double> b);

}  // namespace elreluwl

#endif  // ELRELUWL_EMBEDDING_HPP_
