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

#include "elreluwl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "elreluwl/error.hpp"
#include "elreluwl/log.hpp"
#include "elreluwl/rng.hpp"

namespace elreluwl {
namespace fs = std::filesystem;

LabeledDataset::LabeledDataset(std::vector<Document> documents)
    : documents_(std::move(documents)) {
  for (const Document& doc : documents_) {
    if (doc.label != kNegative && doc.label != kPositive) {
      Fail(ErrorKind::kData, "document '" + doc.source_id + "' has label " +
                                 std::to_string(doc.label) + ", expected 0 or 1");
    }
    if (doc.tokens.empty()) {
      Fail(ErrorKind::kData, "document '" + doc.source_id + "' has no tokens");
    }
    ++class_counts_[doc.label];
  }
}

std::size_t LabeledDataset::k() const {
  return static_cast<std::size_t>(
      std::count_if(class_counts_.begin(), class_counts_.end(),
                    [](std::size_t c) { return c > 0; }));
}

LabeledDataset LabeledDataset::Subset(const std::vector<std::size_t>& indices) const {
  std::vector<Document> docs;
  docs.reserve(indices.size());
  for (std::size_t i : indices) {
    if (i >= documents_.size()) {
      Fail(ErrorKind::kInvalidArgument, "subset index " + std::to_string(i) +
                                            " out of range");
    }
    docs.push_back(documents_[i]);
  }
  return LabeledDataset(std::move(docs));
}

LabeledDataset LabeledDataset::TakePerClass(
    const std::array<std::size_t, kNumLabels>& limit) const {
  std::array<std::size_t, kNumLabels> taken{};
  std::vector<Document> docs;
  for (const Document& doc : documents_) {
    if (taken[doc.label] < limit[doc.label]) {
      ++taken[doc.label];
      docs.push_back(doc);
    }
  }
  return LabeledDataset(std::move(docs));
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool word = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                      (c >= 'A' && c <= 'Z') || c >= 0x80;
    if (word) {
      current.push_back((c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) Fail(ErrorKind::kIo, "read failed for '" + path.string() + "'");
  return buf.str();
}

void ReadPolarityClass(const fs::path& dir, int label, std::vector<Document>& out) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  if (ec) Fail(ErrorKind::kIo, "cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  for (const fs::path& file : files) {
    const std::string text = ReadFile(file);
    if (text.empty()) Fail(ErrorKind::kData, "empty review file '" + file.string() + "'");
    auto tokens = Tokenize(text);
    if (tokens.empty()) {
      LogWarning("dropping '" + file.string() + "': no tokens after tokenization");
      continue;
    }
    out.push_back({std::move(tokens), label,
                   (label == kPositive ? "pos/" : "neg/") + file.filename().string()});
  }
}

}  // namespace

LabeledDataset LoadPolarityDir(const fs::path& root) {
  if (!fs::is_directory(root)) {
    Fail(ErrorKind::kData, "polarity root '" + root.string() + "' is not a directory");
  }
  for (const char* sub : {"pos", "neg"}) {
    if (!fs::is_directory(root / sub)) {
      Fail(ErrorKind::kData, "polarity root '" + root.string() + "' is missing the '" +
                                 sub + "/' subdirectory");
    }
  }
  std::vector<Document> docs;
  ReadPolarityClass(root / "neg", kNegative, docs);
  ReadPolarityClass(root / "pos", kPositive, docs);
  return LabeledDataset(std::move(docs));
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool record_open = false;
  std::size_t i = 0;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
    record_open = false;
  };
  auto where = [&] { return "CSV record " + std::to_string(records.size() + 1); };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    record_open = true;
    if (c == '"') {
      if (!field.empty() || field_was_quoted) {
        Fail(ErrorKind::kData, where() + ": unexpected quote inside field");
      }
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' || c == '\n') {
      end_record();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
    } else {
      if (field_was_quoted) {
        Fail(ErrorKind::kData, where() + ": characters after closing quote");
      }
      field.push_back(c);
    }
    ++i;
  }
  if (in_quotes) Fail(ErrorKind::kData, where() + ": unterminated quoted field");
  if (record_open) end_record();
  return records;
}

LabeledDataset LoadImdbCsv(const fs::path& path, std::optional<ImdbLimits> limits) {
  const std::string text = ReadFile(path);
  const auto records = ParseCsv(text);
  if (records.empty()) Fail(ErrorKind::kData, "'" + path.string() + "' has no header row");
  const auto& header = records.front();
  std::size_t review_col = header.size(), sentiment_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::string name = header[c];
    if (c == 0 && name.rfind("\xEF\xBB\xBF", 0) == 0) name.erase(0, 3);  // BOM
    if (name == "review") review_col = c;
    if (name == "sentiment") sentiment_col = c;
  }
  if (review_col == header.size() || sentiment_col == header.size()) {
    Fail(ErrorKind::kData, "'" + path.string() +
                               "': header must contain 'review' and 'sentiment' columns");
  }
  std::array<std::size_t, kNumLabels> taken{};
  std::vector<Document> docs;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& row = records[r];
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size()) {
      Fail(ErrorKind::kData, "'" + path.string() + "' row " + std::to_string(r) +
                                 ": expected " + std::to_string(header.size()) +
                                 " fields, found " + std::to_string(row.size()));
    }
    const std::string& sentiment = row[sentiment_col];
    int label;
    if (sentiment == "positive") {
      label = kPositive;
    } else if (sentiment == "negative") {
      label = kNegative;
    } else {
      Fail(ErrorKind::kData, "'" + path.string() + "' row " + std::to_string(r) +
                                 ": unknown sentiment '" + sentiment + "'");
    }
    if (limits) {
      const std::size_t cap = label == kPositive ? limits->positive : limits->negative;
      if (taken[label] >= cap) continue;
    }
    auto tokens = Tokenize(row[review_col]);
    if (tokens.empty()) {
      LogWarning("dropping row " + std::to_string(r) + " of '" + path.string() +
                 "': no tokens after tokenization");
      continue;
    }
    ++taken[label];
    docs.push_back({std::move(tokens), label, "row" + std::to_string(r)});
  }
  return LabeledDataset(std::move(docs));
}

std::vector<std::size_t> FoldPlan::TestIndices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::TrainIndices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

namespace {

std::array<std::vector<std::size_t>, kNumLabels> IndicesByClass(
    const LabeledDataset& dataset) {
  std::array<std::vector<std::size_t>, kNumLabels> by_class;
  for (std::size_t i = 0; i < dataset.n(); ++i) {
    by_class[dataset[i].label].push_back(i);
  }
  return by_class;
}

}  // namespace

FoldPlan KFoldSplit(const LabeledDataset& dataset, std::size_t k_folds, std::uint64_t seed) {
  if (k_folds < 2) Fail(ErrorKind::kInvalidArgument, "k_folds must be at least 2");
  if (k_folds > dataset.n()) {
    Fail(ErrorKind::kInvalidArgument, "k_folds (" + std::to_string(k_folds) +
                                          ") exceeds the number of documents (" +
                                          std::to_string(dataset.n()) + ")");
  }
  FoldPlan plan{std::vector<std::size_t>(dataset.n()), k_folds, seed};
  auto by_class = IndicesByClass(dataset);
  std::size_t next_fold = 0;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    Rng rng(MixSeed(seed, c));
    rng.Shuffle(std::span<std::size_t>(by_class[c]));
    for (std::size_t idx : by_class[c]) {
      plan.fold_of[idx] = next_fold;
      next_fold = (next_fold + 1) % k_folds;
    }
  }
  return plan;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> StratifiedHoldout(
    const LabeledDataset& dataset, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "holdout fraction must lie in (0, 1)");
  }
  auto by_class = IndicesByClass(dataset);
  std::vector<std::size_t> keep, held;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    auto& idx = by_class[c];
    Rng rng(MixSeed(seed, 100 + c));
    rng.Shuffle(std::span<std::size_t>(idx));
    auto n_held = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    if (n_held == 0 && idx.size() >= 2) n_held = 1;
    if (n_held >= idx.size() && !idx.empty()) n_held = idx.size() - 1;
    held.insert(held.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_held));
    keep.insert(keep.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_held), idx.end());
  }
  std::sort(keep.begin(), keep.end());
  std::sort(held.begin(), held.end());
  return {std::move(keep), std::move(held)};
}

SynthPools SynthCorpusPools(std::size_t vocab_size) {
  if (vocab_size < 4) Fail(ErrorKind::kInvalidArgument, "synthetic vocab_size must be >= 4");
  const std::size_t per_class = vocab_size / 4;
  SynthPools pools;
  for (std::size_t i = 0; i < per_class; ++i) {
    pools.keywords[kNegative].push_back("kneg" + std::to_string(i));
    pools.keywords[kPositive].push_back("kpos" + std::to_string(i));
  }
  for (std::size_t i = 0; i < vocab_size - 2 * per_class; ++i) {
    pools.shared.push_back("w" + std::to_string(i));
  }
  return pools;
}

LabeledDataset SynthCorpus(const SynthSpec& spec) {
  if (spec.n_per_class == 0 || spec.doc_len == 0) {
    Fail(ErrorKind::kInvalidArgument, "synthetic counts must be positive");
  }
  if (!(spec.signal_strength > 0.0 && spec.signal_strength <= 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "signal_strength must lie in (0, 1]");
  }
  const SynthPools pools = SynthCorpusPools(spec.vocab_size);
  Rng rng(spec.seed);
  std::vector<Document> docs;
  docs.reserve(2 * spec.n_per_class);
  // Interleave classes so prefixes of the corpus stay balanced.
  for (std::size_t i = 0; i < spec.n_per_class; ++i) {
    for (int label : {kNegative, kPositive}) {
      Document doc;
      doc.label = label;
      doc.source_id = "synth" + std::to_string(docs.size());
      doc.tokens.reserve(spec.doc_len);
      const auto& keywords = pools.keywords[label];
      for (std::size_t t = 0; t < spec.doc_len; ++t) {
        if (rng.Bernoulli(spec.signal_strength)) {
          doc.tokens.push_back(keywords[rng.Below(keywords.size())]);
        } else {
          doc.tokens.push_back(pools.shared[rng.Below(pools.shared.size())]);
        }
      }
      docs.push_back(std::move(doc));
    }
  }
  return LabeledDataset(std::move(docs));
}

DatasetStats ComputeStats(const LabeledDataset& dataset) {
  DatasetStats stats;
  stats.n = dataset.n();
  stats.class_counts = dataset.class_counts();
  if (dataset.empty()) return stats;
  stats.min_length = dataset[0].tokens.size();
  double total = 0.0;
  for (const Document& doc : dataset.documents()) {
    stats.min_length = std::min(stats.min_length, doc.tokens.size());
    stats.max_length = std::max(stats.max_length, doc.tokens.size());
    total += static_cast<double>(doc.tokens.size());
  }
  stats.mean_length = total / static_cast<double>(dataset.n());
  return stats;
}

}  // namespace elreluwl
