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


/* C interface to elreluwl. All handles are opaque; every fallible call
 * returns an elr_status and leaves a message retrievable with
 * elr_last_error() on the calling thread. Strings returned through char**
 * out-parameters are owned by the caller and released with
 * elr_string_free(). JSON arguments and results use the schemas written by
 * the library's own save functions. */

#ifndef ELRELUWL_ELRELUWL_H_
#define ELRELUWL_ELRELUWL_H_

#include <stddef.h>
#include <stdint.h>

#if defined(ELR_BUILDING_LIBRARY)
#define ELR_API __attribute__((visibility("default")))
#else
#define ELR_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum elr_status {
  ELR_OK = 0,
  ELR_INVALID_ARGUMENT = 1,
  ELR_DATA = 2,
  ELR_IO = 3,
  ELR_NUMERIC = 4,
  ELR_INTERNAL = 5
} elr_status;

typedef struct elr_dataset elr_dataset;
typedef struct elr_embedding elr_embedding;
typedef struct elr_model elr_model;

ELR_API const char* elr_version(void);
/* Message of the last failed call on this thread; "" after a success. */
ELR_API const char* elr_last_error(void);
ELR_API void elr_string_free(char* s);

/* Datasets. The name labels the dataset in reports. */
ELR_API elr_status elr_dataset_load_polarity(const char* dir, elr_dataset** out);
/* A negative limit keeps every document of that class. */
ELR_API elr_status elr_dataset_load_imdb(const char* csv_path, int64_t negative_limit,
                                         int64_t positive_limit, elr_dataset** out);
ELR_API elr_status elr_dataset_synth(size_t n_per_class, size_t vocab_size, size_t doc_len,
                                     double signal_strength, uint64_t seed, elr_dataset** out);
ELR_API elr_status elr_dataset_load(const char* path, elr_dataset** out);
ELR_API elr_status elr_dataset_save(const elr_dataset* dataset, const char* path);
ELR_API elr_status elr_dataset_take_per_class(const elr_dataset* dataset, size_t negative,
                                              size_t positive, elr_dataset** out);
ELR_API elr_status elr_dataset_set_name(elr_dataset* dataset, const char* name);
ELR_API const char* elr_dataset_name(const elr_dataset* dataset);
ELR_API size_t elr_dataset_size(const elr_dataset* dataset);
/* {"n", "class_counts": [neg, pos], "min_length", "max_length", "mean_length"} */
ELR_API elr_status elr_dataset_summary_json(const elr_dataset* dataset, char** out_json);
ELR_API void elr_dataset_free(elr_dataset* dataset);

/* Embeddings. cbow_json may be NULL for defaults; objective_json receives the
 * per-epoch objective as a JSON array when non-NULL. */
ELR_API elr_status elr_embedding_train(const elr_dataset* dataset, const char* cbow_json,
                                       elr_embedding** out, char** objective_json);
ELR_API elr_status elr_embedding_random(const elr_dataset* dataset, size_t dim, size_t min_count,
                                        uint64_t seed, elr_embedding** out);
ELR_API elr_status elr_embedding_load(const char* path, elr_embedding** out);
ELR_API elr_status elr_embedding_save(const elr_embedding* embedding, const char* path);
ELR_API size_t elr_embedding_dim(const elr_embedding* embedding);
ELR_API size_t elr_embedding_vocab_size(const elr_embedding* embedding);
ELR_API void elr_embedding_free(elr_embedding* embedding);

/* Training configs. name is "baseline-sota" or "elreluwl". */
ELR_API elr_status elr_preset_config(const char* name, size_t embedding_dim, char** out_json);

/* Models. config_json may be partial; missing keys take TrainConfig
 * defaults. report_json receives an elreluwl.train_report document. */
ELR_API elr_status elr_model_train(const elr_dataset* dataset, const elr_embedding* embedding,
                                   const char* config_json, elr_model** out, char** report_json);
ELR_API elr_status elr_model_load(const char* path, elr_model** out);
ELR_API elr_status elr_model_save(const elr_model* model, const char* path,
                                  const char* embedding_ref);
ELR_API elr_status elr_model_config_json(const elr_model* model, char** out_json);
/* Probability of each class for one tokenized document. */
ELR_API elr_status elr_model_predict(const elr_model* model, const elr_embedding* embedding,
                                     const char* const* tokens, size_t n_tokens,
                                     double* probs, size_t n_probs);
ELR_API void elr_model_free(elr_model* model);

/* Experiments; each result is a report document accepted by elr_emit_report. */
ELR_API elr_status elr_cross_validate(const elr_dataset* dataset, const elr_embedding* embedding,
                                      const char* config_json, size_t k_folds, uint64_t seed,
                                      char** report_json);
ELR_API elr_status elr_compare(const elr_dataset* dataset, const elr_embedding* embedding,
                               const char* baseline_json, const char* proposed_json,
                               const uint64_t* seeds, size_t n_seeds, char** report_json);
/* options_json (may be NULL): {"preset", "strata", "per_stratum", "seed",
 * "timing", "timing_samples", "warmup", "repeats"}. */
ELR_API elr_status elr_evaluate(const elr_model* model, const elr_embedding* embedding,
                                const elr_dataset* dataset, const char* options_json,
                                char** report_json);
/* Times two models on the first `samples` documents of dataset. Result:
 * {"baseline": timing, "proposed": timing, "median_ratio"}. */
ELR_API elr_status elr_time_pair(const elr_model* baseline, const elr_model* proposed,
                                 const elr_embedding* embedding, const elr_dataset* dataset,
                                 size_t samples, size_t warmup, size_t repeats,
                                 char** out_json);
/* options_json (may be NULL): {"trials", "seed", "a", "h", "tol",
 * "sentence_len", "activations": [...]}. passed is set to 1 or 0. */
ELR_API elr_status elr_gradcheck(const char* options_json, char** report_json, int* passed);
/* Writes metrics.csv, summary.csv and report.md for the given reports. */
ELR_API elr_status elr_emit_report(const char* const* report_jsons, size_t n_reports,
                                   const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif  /* ELRELUWL_ELRELUWL_H_ */
