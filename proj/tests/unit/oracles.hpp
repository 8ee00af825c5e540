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


// Independent reference implementations used as test oracles.

#ifndef ELRELUWL_TESTS_ORACLES_HPP_
#define ELRELUWL_TESTS_ORACLES_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "elreluwl/corpus.hpp"
#include "elreluwl/functions.hpp"
#include "elreluwl/matrix.hpp"
#include "elreluwl/network.hpp"

namespace oracle {

// Scalar activation written straight from the branch definitions.
double Act(elreluwl::ActivationKind kind, double a, double x);

// e^z / sum e^z without stabilization.
std::vector<double> NaiveSoftmax(const std::vector<double>& z);

// Unigram multinomial Naive Bayes with add-one smoothing.
class NaiveBayes {
 public:
  explicit NaiveBayes(const elreluwl::LabeledDataset& train);
  int Predict(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> vocab_;
  std::vector<double> log_prior_;
  std::vector<std::vector<double>> log_lik_;  // class x word
  std::vector<double> log_unknown_;
};

// Loop-only forward pass: returns class probabilities. `mask` holds one
// multiplier per pooled feature (bank-major).
std::vector<double> NaiveProbs(const elreluwl::ModelParams& params,
                               const elreluwl::Matrix& sentence,
                               const std::vector<double>& mask);

double NaiveLoss(const elreluwl::ModelParams& params, const elreluwl::Matrix& sentence,
                 const std::vector<double>& mask, std::size_t target, double weight);

// Central differences of NaiveLoss for every parameter, same layout as
// ModelParams.
elreluwl::ModelParams NumericGradient(const elreluwl::ModelParams& params,
                                      const elreluwl::Matrix& sentence,
                                      const std::vector<double>& mask, std::size_t target,
                                      double weight, double h);

// Every parameter of a model, flattened in a fixed order.
std::vector<double> Flatten(const elreluwl::ModelParams& p);

elreluwl::Matrix RandomMatrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                              double lo = -1.0, double hi = 1.0);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

void WriteFile(const std::filesystem::path& path, const std::string& text);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace oracle

#endif  // ELRELUWL_TESTS_ORACLES_HPP_
