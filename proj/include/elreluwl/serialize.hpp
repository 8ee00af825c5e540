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

#ifndef ELRELUWL_SERIALIZE_HPP_
#define ELRELUWL_SERIALIZE_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "elreluwl/corpus.hpp"
#include "elreluwl/embedding.hpp"
#include "elreluwl/gradient_check.hpp"
#include "elreluwl/network.hpp"
#include "elreluwl/report.hpp"
#include "elreluwl/training.hpp"

// JSON documents exchanged through files and the C API. Every document
// carries "schema" and "version"; loaders reject unknown versions and check
// every array shape.
namespace elreluwl {

inline constexpr int kSchemaVersion = 1;

// `name` labels the dataset in reports; empty leaves it out.
std::string DatasetToJson(const LabeledDataset& dataset, std::string_view name = "");
LabeledDataset DatasetFromJson(std::string_view json, std::string* name = nullptr);

std::string EmbeddingsToJson(const Embeddings& embeddings);
Embeddings EmbeddingsFromJson(std::string_view json);

std::string ModelToJson(const ModelParams& params, std::string_view embedding_ref = "");
ModelParams ModelFromJson(std::string_view json);

std::string CbowConfigToJson(const CbowConfig& config);
CbowConfig CbowConfigFromJson(std::string_view json);

std::string NetworkConfigToJson(const NetworkConfig& config);
std::string TrainConfigToJson(const TrainConfig& config);
// Missing keys keep the values of `defaults`.
TrainConfig TrainConfigFromJson(std::string_view json, const TrainConfig& defaults = {});

std::string ReportItemToJson(const ReportItem& item);
ReportItem ReportItemFromJson(std::string_view json);

std::string GradCheckReportToJson(const GradCheckReport& report);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace elreluwl

#endif  // ELRELUWL_SERIALIZE_HPP_
