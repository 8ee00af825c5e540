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


#include "elreluwl/elreluwl.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <utility>
#include <vector>

#include "elreluwl/corpus.hpp"
#include "elreluwl/embedding.hpp"
#include "elreluwl/error.hpp"
#include "elreluwl/gradient_check.hpp"
#include "elreluwl/metrics.hpp"
#include "elreluwl/network.hpp"
#include "elreluwl/report.hpp"
#include "elreluwl/serialize.hpp"
#include "elreluwl/training.hpp"
#include "json.hpp"

struct elr_dataset {
  elreluwl::LabeledDataset data;
  std::string name;
};

struct elr_embedding {
  elreluwl::Embeddings value;
};

struct elr_model {
  elreluwl::ModelParams params;
};

namespace {

using elreluwl::Error;
using elreluwl::ErrorKind;
using elreluwl::Fail;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

thread_local std::string last_error;

elr_status StatusOf(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return ELR_INVALID_ARGUMENT;
    case ErrorKind::kData: return ELR_DATA;
    case ErrorKind::kIo: return ELR_IO;
    case ErrorKind::kNumeric: return ELR_NUMERIC;
  }
  return ELR_INTERNAL;
}

template <typename Fn>
elr_status Guarded(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return ELR_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return StatusOf(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ELR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ELR_INTERNAL;
  }
}

void Require(bool ok, const char* what) {
  if (!ok) Fail(ErrorKind::kInvalidArgument, std::string(what) + " must not be null");
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json ParseOptions(const char* text, const char* what) {
  if (text == nullptr || *text == '\0') return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) Fail(ErrorKind::kInvalidArgument, std::string(what) + " must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    Fail(ErrorKind::kInvalidArgument, std::string(what) + ": " + e.what());
  }
}

template <typename T>
T Option(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    Fail(ErrorKind::kInvalidArgument, std::string("option '") + key + "' has the wrong type");
  }
}

elreluwl::TrainConfig ConfigFor(const char* config_json, const elr_embedding* embedding) {
  elreluwl::TrainConfig defaults;
  defaults.network.embedding_dim = embedding->value.table.vectors.cols();
  if (config_json == nullptr || *config_json == '\0') return defaults;
  try {
    return elreluwl::TrainConfigFromJson(config_json, defaults);
  } catch (const Error& e) {
    // Malformed configs are caller mistakes rather than bad data files.
    if (e.kind() == ErrorKind::kData) Fail(ErrorKind::kInvalidArgument, e.what());
    throw;
  }
}

}  // namespace

extern "C" {

const char* elr_version(void) { return kVersion; }

const char* elr_last_error(void) { return last_error.c_str(); }

void elr_string_free(char* s) { std::free(s); }

elr_status elr_dataset_load_polarity(const char* dir, elr_dataset** out) {
  return Guarded([&] {
    Require(dir != nullptr && out != nullptr, "dir/out");
    *out = new elr_dataset{elreluwl::LoadPolarityDir(dir), "polarity"};
  });
}

elr_status elr_dataset_load_imdb(const char* csv_path, int64_t negative_limit,
                                 int64_t positive_limit, elr_dataset** out) {
  return Guarded([&] {
    Require(csv_path != nullptr && out != nullptr, "csv_path/out");
    std::optional<elreluwl::ImdbLimits> limits;
    if (negative_limit >= 0 || positive_limit >= 0) {
      constexpr auto kAll = std::numeric_limits<std::size_t>::max();
      limits = elreluwl::ImdbLimits{
          negative_limit < 0 ? kAll : static_cast<std::size_t>(negative_limit),
          positive_limit < 0 ? kAll : static_cast<std::size_t>(positive_limit)};
    }
    *out = new elr_dataset{elreluwl::LoadImdbCsv(csv_path, limits), "imdb"};
  });
}

elr_status elr_dataset_synth(size_t n_per_class, size_t vocab_size, size_t doc_len,
                             double signal_strength, uint64_t seed, elr_dataset** out) {
  return Guarded([&] {
    Require(out != nullptr, "out");
    elreluwl::SynthSpec spec{n_per_class, vocab_size, doc_len, signal_strength, seed};
    *out = new elr_dataset{elreluwl::SynthCorpus(spec), "synth"};
  });
}

elr_status elr_dataset_load(const char* path, elr_dataset** out) {
  return Guarded([&] {
    Require(path != nullptr && out != nullptr, "path/out");
    std::string name;
    elreluwl::LabeledDataset ds = elreluwl::DatasetFromJson(elreluwl::ReadTextFile(path), &name);
    *out = new elr_dataset{std::move(ds), name.empty() ? "dataset" : name};
  });
}

elr_status elr_dataset_save(const elr_dataset* dataset, const char* path) {
  return Guarded([&] {
    Require(dataset != nullptr && path != nullptr, "dataset/path");
    elreluwl::WriteTextFile(path, elreluwl::DatasetToJson(dataset->data, dataset->name));
  });
}

elr_status elr_dataset_take_per_class(const elr_dataset* dataset, size_t negative, size_t positive,
                                      elr_dataset** out) {
  return Guarded([&] {
    Require(dataset != nullptr && out != nullptr, "dataset/out");
    *out = new elr_dataset{dataset->data.TakePerClass({negative, positive}), dataset->name};
  });
}

elr_status elr_dataset_set_name(elr_dataset* dataset, const char* name) {
  return Guarded([&] {
    Require(dataset != nullptr && name != nullptr, "dataset/name");
    if (*name == '\0') Fail(ErrorKind::kInvalidArgument, "dataset name must not be empty");
    dataset->name = name;
  });
}

const char* elr_dataset_name(const elr_dataset* dataset) {
  return dataset == nullptr ? "" : dataset->name.c_str();
}

size_t elr_dataset_size(const elr_dataset* dataset) {
  return dataset == nullptr ? 0 : dataset->data.n();
}

elr_status elr_dataset_summary_json(const elr_dataset* dataset, char** out_json) {
  return Guarded([&] {
    Require(dataset != nullptr && out_json != nullptr, "dataset/out_json");
    const elreluwl::DatasetStats s = elreluwl::ComputeStats(dataset->data);
    json j{{"name", dataset->name},
           {"n", s.n},
           {"class_counts", s.class_counts},
           {"min_length", s.min_length},
           {"max_length", s.max_length},
           {"mean_length", s.mean_length}};
    *out_json = CopyString(j.dump());
  });
}

void elr_dataset_free(elr_dataset* dataset) { delete dataset; }

elr_status elr_embedding_train(const elr_dataset* dataset, const char* cbow_json,
                               elr_embedding** out, char** objective_json) {
  return Guarded([&] {
    Require(dataset != nullptr && out != nullptr, "dataset/out");
    elreluwl::CbowConfig config;
    if (cbow_json != nullptr && *cbow_json != '\0') {
      try {
        config = elreluwl::CbowConfigFromJson(cbow_json);
      } catch (const Error& e) {
        Fail(ErrorKind::kInvalidArgument, e.what());
      }
    }
    elreluwl::Vocabulary vocab = elreluwl::BuildVocab(dataset->data, config.min_count);
    std::vector<double> objective;
    elreluwl::EmbeddingTable table = elreluwl::TrainCbow(dataset->data, vocab, config, &objective);
    std::string objective_text = json(objective).dump();
    *out = new elr_embedding{{std::move(vocab), std::move(table)}};
    if (objective_json != nullptr) *objective_json = CopyString(objective_text);
  });
}

elr_status elr_embedding_random(const elr_dataset* dataset, size_t dim, size_t min_count,
                                uint64_t seed, elr_embedding** out) {
  return Guarded([&] {
    Require(dataset != nullptr && out != nullptr, "dataset/out");
    if (dim == 0) Fail(ErrorKind::kInvalidArgument, "dim must be >= 1");
    elreluwl::Vocabulary vocab = elreluwl::BuildVocab(dataset->data, min_count);
    elreluwl::EmbeddingTable table = elreluwl::InitRandomEmbeddings(vocab, dim, seed);
    *out = new elr_embedding{{std::move(vocab), std::move(table)}};
  });
}

elr_status elr_embedding_load(const char* path, elr_embedding** out) {
  return Guarded([&] {
    Require(path != nullptr && out != nullptr, "path/out");
    *out = new elr_embedding{elreluwl::EmbeddingsFromJson(elreluwl::ReadTextFile(path))};
  });
}

elr_status elr_embedding_save(const elr_embedding* embedding, const char* path) {
  return Guarded([&] {
    Require(embedding != nullptr && path != nullptr, "embedding/path");
    elreluwl::WriteTextFile(path, elreluwl::EmbeddingsToJson(embedding->value));
  });
}

size_t elr_embedding_dim(const elr_embedding* embedding) {
  return embedding == nullptr ? 0 : embedding->value.table.vectors.cols();
}

size_t elr_embedding_vocab_size(const elr_embedding* embedding) {
  return embedding == nullptr ? 0 : embedding->value.vocab.size();
}

void elr_embedding_free(elr_embedding* embedding) { delete embedding; }

elr_status elr_preset_config(const char* name, size_t embedding_dim, char** out_json) {
  return Guarded([&] {
    Require(name != nullptr && out_json != nullptr, "name/out_json");
    *out_json = CopyString(elreluwl::TrainConfigToJson(elreluwl::PresetByName(name, embedding_dim)));
  });
}

elr_status elr_model_train(const elr_dataset* dataset, const elr_embedding* embedding,
                           const char* config_json, elr_model** out, char** report_json) {
  return Guarded([&] {
    Require(dataset != nullptr && embedding != nullptr && out != nullptr,
            "dataset/embedding/out");
    const elreluwl::TrainConfig config = ConfigFor(config_json, embedding);
    elreluwl::TrainResult result = elreluwl::Train(dataset->data, embedding->value, config);
    std::string report;
    if (report_json != nullptr) {
      report = elreluwl::ReportItemToJson(elreluwl::TrainRun{dataset->name, result.report});
    }
    *out = new elr_model{std::move(result.params)};
    if (report_json != nullptr) *report_json = CopyString(report);
  });
}

elr_status elr_model_load(const char* path, elr_model** out) {
  return Guarded([&] {
    Require(path != nullptr && out != nullptr, "path/out");
    *out = new elr_model{elreluwl::ModelFromJson(elreluwl::ReadTextFile(path))};
  });
}

elr_status elr_model_save(const elr_model* model, const char* path, const char* embedding_ref) {
  return Guarded([&] {
    Require(model != nullptr && path != nullptr, "model/path");
    elreluwl::WriteTextFile(
        path, elreluwl::ModelToJson(model->params, embedding_ref == nullptr ? "" : embedding_ref));
  });
}

elr_status elr_model_config_json(const elr_model* model, char** out_json) {
  return Guarded([&] {
    Require(model != nullptr && out_json != nullptr, "model/out_json");
    *out_json = CopyString(elreluwl::NetworkConfigToJson(model->params.config));
  });
}

elr_status elr_model_predict(const elr_model* model, const elr_embedding* embedding,
                             const char* const* tokens, size_t n_tokens, double* probs,
                             size_t n_probs) {
  return Guarded([&] {
    Require(model != nullptr && embedding != nullptr && probs != nullptr,
            "model/embedding/probs");
    Require(tokens != nullptr || n_tokens == 0, "tokens");
    if (n_probs != model->params.config.num_classes) {
      Fail(ErrorKind::kInvalidArgument, "probs must hold num_classes values");
    }
    std::vector<std::string> words;
    words.reserve(n_tokens);
    for (size_t i = 0; i < n_tokens; ++i) {
      Require(tokens[i] != nullptr, "token");
      words.emplace_back(tokens[i]);
    }
    const elreluwl::Matrix sentence = elreluwl::EmbedLookup(
        embedding->value.vocab, embedding->value.table, words, model->params.config.max_width());
    const elreluwl::Prediction p = elreluwl::Predict(model->params, sentence);
    std::copy(p.probs.begin(), p.probs.end(), probs);
  });
}

void elr_model_free(elr_model* model) { delete model; }

elr_status elr_cross_validate(const elr_dataset* dataset, const elr_embedding* embedding,
                              const char* config_json, size_t k_folds, uint64_t seed,
                              char** report_json) {
  return Guarded([&] {
    Require(dataset != nullptr && embedding != nullptr && report_json != nullptr,
            "dataset/embedding/report_json");
    const elreluwl::TrainConfig config = ConfigFor(config_json, embedding);
    elreluwl::CvReport report =
        elreluwl::RunFoldCv(dataset->data, embedding->value, config, k_folds, seed);
    *report_json = CopyString(elreluwl::ReportItemToJson(elreluwl::CvRun{dataset->name, report}));
  });
}

elr_status elr_compare(const elr_dataset* dataset, const elr_embedding* embedding,
                       const char* baseline_json, const char* proposed_json,
                       const uint64_t* seeds, size_t n_seeds, char** report_json) {
  return Guarded([&] {
    Require(dataset != nullptr && embedding != nullptr && report_json != nullptr,
            "dataset/embedding/report_json");
    Require(seeds != nullptr || n_seeds == 0, "seeds");
    if (n_seeds == 0) Fail(ErrorKind::kInvalidArgument, "at least one seed is required");
    const elreluwl::TrainConfig baseline = ConfigFor(baseline_json, embedding);
    const elreluwl::TrainConfig proposed = ConfigFor(proposed_json, embedding);
    const std::vector<std::uint64_t> seed_list(seeds, seeds + n_seeds);
    elreluwl::ComparisonReport report =
        elreluwl::CompareRuns(dataset->data, embedding->value, baseline, proposed, seed_list);
    *report_json =
        CopyString(elreluwl::ReportItemToJson(elreluwl::ComparisonRun{dataset->name, report}));
  });
}

elr_status elr_evaluate(const elr_model* model, const elr_embedding* embedding,
                        const elr_dataset* dataset, const char* options_json, char** report_json) {
  return Guarded([&] {
    Require(model != nullptr && embedding != nullptr && dataset != nullptr &&
                report_json != nullptr,
            "model/embedding/dataset/report_json");
    const json opts = ParseOptions(options_json, "evaluate options");
    elreluwl::EvalRun run;
    run.dataset = dataset->name;
    run.preset = Option<std::string>(opts, "preset", "model");
    run.overall = elreluwl::Evaluate(model->params, embedding->value, dataset->data);
    const auto strata = Option<std::size_t>(opts, "strata", 0);
    if (strata > 0) {
      run.strata = elreluwl::StratifiedSampleEval(
          model->params, embedding->value, dataset->data, strata,
          Option<std::size_t>(opts, "per_stratum", 10), Option<std::uint64_t>(opts, "seed", 1));
    }
    if (Option<bool>(opts, "timing", false)) {
      const auto samples = std::min(Option<std::size_t>(opts, "timing_samples", 100),
                                    dataset->data.n());
      std::vector<elreluwl::Document> docs(dataset->data.documents().begin(),
                                           dataset->data.documents().begin() +
                                               static_cast<std::ptrdiff_t>(samples));
      run.timing = elreluwl::MeasureInferenceTime(model->params, embedding->value, docs,
                                                  Option<std::size_t>(opts, "warmup", 3),
                                                  Option<std::size_t>(opts, "repeats", 5));
    }
    *report_json = CopyString(elreluwl::ReportItemToJson(run));
  });
}

elr_status elr_time_pair(const elr_model* baseline, const elr_model* proposed,
                         const elr_embedding* embedding, const elr_dataset* dataset,
                         size_t samples, size_t warmup, size_t repeats, char** out_json) {
  return Guarded([&] {
    Require(baseline != nullptr && proposed != nullptr && embedding != nullptr &&
                dataset != nullptr && out_json != nullptr,
            "baseline/proposed/embedding/dataset/out_json");
    const auto& all = dataset->data.documents();
    const std::vector<elreluwl::Document> docs(
        all.begin(), all.begin() + static_cast<std::ptrdiff_t>(std::min(samples, all.size())));
    const elreluwl::PairedTiming t = elreluwl::MeasurePairedInferenceTime(
        baseline->params, proposed->params, embedding->value, docs, warmup, repeats);
    const auto stats = [](const elreluwl::TimingStats& s) {
      return json{{"measurements", s.measurements}, {"median_ms", s.median_ms},
                  {"mean_ms", s.mean_ms},           {"min_ms", s.min_ms},
                  {"max_ms", s.max_ms}};
    };
    *out_json = CopyString(json{{"baseline", stats(t.baseline)},
                                {"proposed", stats(t.proposed)},
                                {"median_ratio", t.median_ratio}}
                               .dump());
  });
}

elr_status elr_gradcheck(const char* options_json, char** report_json, int* passed) {
  return Guarded([&] {
    Require(report_json != nullptr, "report_json");
    const json opts = ParseOptions(options_json, "gradcheck options");
    elreluwl::GradCheckOptions o;
    o.trials = Option(opts, "trials", o.trials);
    o.seed = Option(opts, "seed", o.seed);
    o.a = Option(opts, "a", o.a);
    o.h = Option(opts, "h", o.h);
    o.tol = Option(opts, "tol", o.tol);
    o.sentence_len = Option(opts, "sentence_len", o.sentence_len);
    if (opts.contains("activations")) {
      o.kinds.clear();
      for (const auto& name : Option<std::vector<std::string>>(opts, "activations", {})) {
        o.kinds.push_back(elreluwl::ParseActivationKind(name));
      }
    }
    const elreluwl::GradCheckReport report = elreluwl::GradientCheck(o);
    *report_json = CopyString(elreluwl::GradCheckReportToJson(report));
    if (passed != nullptr) *passed = report.passed() ? 1 : 0;
  });
}

elr_status elr_emit_report(const char* const* report_jsons, size_t n_reports,
                           const char* out_dir) {
  return Guarded([&] {
    Require(out_dir != nullptr, "out_dir");
    Require(report_jsons != nullptr || n_reports == 0, "report_jsons");
    std::vector<elreluwl::ReportItem> items;
    items.reserve(n_reports);
    for (size_t i = 0; i < n_reports; ++i) {
      Require(report_jsons[i] != nullptr, "report");
      items.push_back(elreluwl::ReportItemFromJson(report_jsons[i]));
    }
    elreluwl::EmitReport(items, out_dir);
  });
}

}  // extern "C"
