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

#ifndef ELRELUWL_CORPUS_HPP_
#define ELRELUWL_CORPUS_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elreluwl {

inline constexpr int kNegative = 0;
inline constexpr int kPositive = 1;
inline constexpr std::size_t kNumLabels = 2;

struct Document {
  std::vector<std::string> tokens;
  int label = kNegative;
  std::string source_id;

  bool operator==(const Document&) const = default;
};

/// Tokenized two-class corpus. Class tallies are derived from the documents
/// at construction and cannot drift from them.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  // Throws kData on a label outside {0, 1} or a document without tokens.
  explicit LabeledDataset(std::vector<Document> documents);

  const std::vector<Document>& documents() const { return documents_; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  std::size_t n() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  // Number of distinct labels present.
  std::size_t k() const;
  std::size_t count(int label) const { return class_counts_.at(label); }
  const std::array<std::size_t, kNumLabels>& class_counts() const { return class_counts_; }

  // Documents at `indices`, in that order.
  LabeledDataset Subset(const std::vector<std::size_t>& indices) const;

  // First `limit[label]` documents of each class, original order preserved.
  LabeledDataset TakePerClass(const std::array<std::size_t, kNumLabels>& limit) const;

  bool operator==(const LabeledDataset&) const = default;

 private:
  std::vector<Document> documents_;
  std::array<std::size_t, kNumLabels> class_counts_{};
};

/// Lowercases ASCII letters and splits on every run of characters that are
/// not ASCII alphanumerics. Bytes >= 0x80 count as word characters so UTF-8
/// letters stay inside their words.
std::vector<std::string> Tokenize(std::string_view text);

/// Reads `<root>/pos/*.txt` (label 1) and `<root>/neg/*.txt` (label 0).
/// Documents are ordered by (label, filename).
LabeledDataset LoadPolarityDir(const std::filesystem::path& root);

struct ImdbLimits {
  std::size_t negative;
  std::size_t positive;
};

/// Reads a `review,sentiment` CSV (RFC 4180). With `limits`, keeps the first
/// rows of each class in file order.
LabeledDataset LoadImdbCsv(const std::filesystem::path& path,
                           std::optional<ImdbLimits> limits = std::nullopt);

// Parses CSV text into records. Exposed for testing; throws kData with the
// 1-based record number on an unterminated quote or stray quote character.
std::vector<std::vector<std::string>> ParseCsv(std::string_view text);

struct FoldPlan {
  std::vector<std::size_t> fold_of;  // per-document fold index
  std::size_t k_folds = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> TestIndices(std::size_t fold) const;
  std::vector<std::size_t> TrainIndices(std::size_t fold) const;

  bool operator==(const FoldPlan&) const = default;
};

/// Stratified k-fold assignment: each class is shuffled with `seed` and
/// dealt round-robin, continuing the deal across classes so total fold sizes
/// also differ by at most one.
FoldPlan KFoldSplit(const LabeledDataset& dataset, std::size_t k_folds,
                    std::uint64_t seed);

/// Stratified two-way split. Returns (first, second) index lists where the
/// second part holds round(fraction * count) documents of each class (at
/// least one when the class has two or more documents).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> StratifiedHoldout(
    const LabeledDataset& dataset, double fraction, std::uint64_t seed);

struct SynthSpec {
  std::size_t n_per_class = 200;
  std::size_t vocab_size = 50;
  std::size_t doc_len = 30;
  double signal_strength = 1.0;
  std::uint64_t seed = 7;
};

/// Two-class synthetic corpus. The vocabulary is split into a keyword pool
/// per class and a shared pool; each token of a class-c document comes from
/// c's keyword pool with probability `signal_strength`, otherwise from the
/// shared pool. At signal 1 every token is a class keyword.
LabeledDataset SynthCorpus(const SynthSpec& spec);

// Vocabulary words backing SynthCorpus, by pool; exposed for tests.
struct SynthPools {
  std::array<std::vector<std::string>, kNumLabels> keywords;
  std::vector<std::string> shared;
};
SynthPools SynthCorpusPools(std::size_t vocab_size);

struct DatasetStats {
  std::size_t n = 0;
  std::array<std::size_t, kNumLabels> class_counts{};
  std::size_t min_length = 0;
  std::size_t max_length = 0;
  double mean_length = 0.0;
};

DatasetStats ComputeStats(const LabeledDataset& dataset);

}  // namespace elreluwl

#endif  // ELRELUWL_CORPUS_HPP_
