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


#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "elreluwl/elreluwl.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("elreluwl-capi-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Takes ownership of a library string.
std::string Take(char* s) {
  std::string out = s ? s : "";
  elr_string_free(s);
  return out;
}

const char* kQuick = R"({"name": "elreluwl", "network": {"filter_widths": [2, 3],
  "maps_per_width": 3}, "max_epochs": 2, "batch_size": 10, "record_timing": false})";

}  // namespace

TEST_CASE("version and error state") {
  CHECK(std::string(elr_version()).size() > 0);
  elr_dataset* ds = nullptr;
  CHECK(elr_dataset_load("/nonexistent/dataset.json", &ds) == ELR_IO);
  CHECK(ds == nullptr);
  CHECK(std::string(elr_last_error()).find("/nonexistent/dataset.json") != std::string::npos);
  CHECK(elr_dataset_synth(10, 30, 6, 0.8, 1, &ds) == ELR_OK);
  CHECK(std::string(elr_last_error()).empty());
  elr_dataset_free(ds);
}

TEST_CASE("null and invalid arguments") {
  elr_dataset* ds = nullptr;
  CHECK(elr_dataset_synth(10, 30, 6, 0.8, 1, nullptr) == ELR_INVALID_ARGUMENT);
  CHECK(elr_dataset_load(nullptr, &ds) == ELR_INVALID_ARGUMENT);
  CHECK(elr_dataset_synth(10, 3, 6, 0.8, 1, &ds) == ELR_INVALID_ARGUMENT);
  CHECK(elr_dataset_synth(10, 30, 6, 1.5, 1, &ds) == ELR_INVALID_ARGUMENT);
  char* out = nullptr;
  CHECK(elr_preset_config("nope", 10, &out) == ELR_INVALID_ARGUMENT);
  CHECK(out == nullptr);
  CHECK(elr_model_train(nullptr, nullptr, nullptr, nullptr, nullptr) == ELR_INVALID_ARGUMENT);
  CHECK(elr_emit_report(nullptr, 0, "/tmp/x") == ELR_INVALID_ARGUMENT);
  elr_dataset_free(nullptr);
  elr_embedding_free(nullptr);
  elr_model_free(nullptr);
  elr_string_free(nullptr);
}

TEST_CASE("data errors map to ELR_DATA") {
  Scratch dir;
  const fs::path csv = dir.path / "bad.csv";
  std::ofstream(csv) << "review,sentiment\nfine,maybe\n";
  elr_dataset* ds = nullptr;
  CHECK(elr_dataset_load_imdb(csv.c_str(), -1, -1, &ds) == ELR_DATA);
  CHECK(std::string(elr_last_error()).find("maybe") != std::string::npos);
  const fs::path polarity = dir.path / "polarity";
  fs::create_directories(polarity / "pos");
  CHECK(elr_dataset_load_polarity(polarity.c_str(), &ds) == ELR_DATA);
  CHECK(std::string(elr_last_error()).find("neg") != std::string::npos);
}

TEST_CASE("dataset handles") {
  Scratch dir;
  elr_dataset* ds = nullptr;
  REQUIRE(elr_dataset_synth(30, 30, 6, 0.8, 1, &ds) == ELR_OK);
  CHECK(elr_dataset_size(ds) == 60);
  CHECK(std::string(elr_dataset_name(ds)) == "synth");
  CHECK(elr_dataset_set_name(ds, "tiny") == ELR_OK);
  char* summary = nullptr;
  REQUIRE(elr_dataset_summary_json(ds, &summary) == ELR_OK);
  const json s = json::parse(Take(summary));
  CHECK(s["n"] == 60);
  CHECK(s["name"] == "tiny");
  CHECK(s["class_counts"] == json::array({30, 30}));
  CHECK(s["min_length"] == 6);

  elr_dataset* part = nullptr;
  REQUIRE(elr_dataset_take_per_class(ds, 20, 10, &part) == ELR_OK);
  CHECK(elr_dataset_size(part) == 30);
  CHECK(std::string(elr_dataset_name(part)) == "tiny");

  const fs::path file = dir.path / "d.json";
  REQUIRE(elr_dataset_save(part, file.c_str()) == ELR_OK);
  elr_dataset* back = nullptr;
  REQUIRE(elr_dataset_load(file.c_str(), &back) == ELR_OK);
  CHECK(elr_dataset_size(back) == 30);
  CHECK(std::string(elr_dataset_name(back)) == "tiny");
  elr_dataset_free(back);
  elr_dataset_free(part);
  elr_dataset_free(ds);
}

TEST_CASE("pipeline through the C interface") {
  Scratch dir;
  elr_dataset* ds = nullptr;
  REQUIRE(elr_dataset_synth(40, 30, 10, 1.0, 7, &ds) == ELR_OK);

  elr_embedding* emb = nullptr;
  char* objective = nullptr;
  REQUIRE(elr_embedding_train(ds, R"({"dim": 6, "epochs": 2})", &emb, &objective) == ELR_OK);
  const json obj = json::parse(Take(objective));
  CHECK(obj.size() == 2);
  CHECK(elr_embedding_dim(emb) == 6);
  CHECK(elr_embedding_vocab_size(emb) == 15);
  const fs::path emb_file = dir.path / "emb.json";
  REQUIRE(elr_embedding_save(emb, emb_file.c_str()) == ELR_OK);
  elr_embedding* emb2 = nullptr;
  REQUIRE(elr_embedding_load(emb_file.c_str(), &emb2) == ELR_OK);
  CHECK(elr_embedding_dim(emb2) == 6);

  elr_model* model = nullptr;
  char* report = nullptr;
  REQUIRE(elr_model_train(ds, emb, kQuick, &model, &report) == ELR_OK);
  const std::string train_report = Take(report);
  CHECK(json::parse(train_report)["schema"] == "elreluwl.train_report");

  char* cfg = nullptr;
  REQUIRE(elr_model_config_json(model, &cfg) == ELR_OK);
  const json c = json::parse(Take(cfg));
  CHECK(c["embedding_dim"] == 6);
  CHECK(c["maps_per_width"] == 3);

  const char* tokens[] = {"kpos0", "unknownword"};
  double probs[2] = {0, 0};
  REQUIRE(elr_model_predict(model, emb, tokens, 1, probs, 2) == ELR_OK);
  CHECK(probs[0] + probs[1] == doctest::Approx(1.0));
  CHECK(elr_model_predict(model, emb, tokens, 0, probs, 2) == ELR_INVALID_ARGUMENT);
  CHECK(elr_model_predict(model, emb, tokens, 2, probs, 1) == ELR_INVALID_ARGUMENT);

  const fs::path model_file = dir.path / "model.json";
  REQUIRE(elr_model_save(model, model_file.c_str(), "emb.json") == ELR_OK);
  elr_model* loaded = nullptr;
  REQUIRE(elr_model_load(model_file.c_str(), &loaded) == ELR_OK);
  double probs2[2] = {0, 0};
  REQUIRE(elr_model_predict(loaded, emb2, tokens, 2, probs2, 2) == ELR_OK);
  REQUIRE(elr_model_predict(model, emb, tokens, 2, probs, 2) == ELR_OK);
  CHECK(probs2[0] == probs[0]);

  char* eval = nullptr;
  REQUIRE(elr_evaluate(model, emb, ds, R"({"strata": 2, "per_stratum": 5, "timing": false})",
                       &eval) == ELR_OK);
  const std::string eval_report = Take(eval);
  const json ev = json::parse(eval_report);
  CHECK(ev["schema"] == "elreluwl.eval_report");

  char* cv = nullptr;
  REQUIRE(elr_cross_validate(ds, emb, kQuick, 2, 3, &cv) == ELR_OK);
  const std::string cv_report = Take(cv);

  const uint64_t seeds[] = {1, 2};
  char* cmp = nullptr;
  REQUIRE(elr_compare(ds, emb, kQuick, kQuick, seeds, 2, &cmp) == ELR_OK);
  const std::string cmp_report = Take(cmp);
  CHECK(json::parse(cmp_report)["report"]["runs"].size() == 2);

  char* timing = nullptr;
  REQUIRE(elr_time_pair(model, loaded, emb, ds, 5, 1, 2, &timing) == ELR_OK);
  const json t = json::parse(Take(timing));
  CHECK(t["baseline"]["measurements"] == 10);
  CHECK(t.contains("median_ratio"));

  const char* reports[] = {train_report.c_str(), eval_report.c_str(), cv_report.c_str(),
                           cmp_report.c_str()};
  const fs::path out = dir.path / "out";
  REQUIRE(elr_emit_report(reports, 4, out.c_str()) == ELR_OK);
  CHECK(fs::exists(out / "metrics.csv"));
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "report.md"));
  const char* garbage[] = {"{}"};
  CHECK(elr_emit_report(garbage, 1, out.c_str()) == ELR_DATA);

  elr_model_free(loaded);
  elr_model_free(model);
  elr_embedding_free(emb2);
  elr_embedding_free(emb);
  elr_dataset_free(ds);
}

TEST_CASE("training argument errors") {
  elr_dataset* ds = nullptr;
  REQUIRE(elr_dataset_synth(20, 30, 6, 0.8, 1, &ds) == ELR_OK);
  elr_embedding* emb = nullptr;
  REQUIRE(elr_embedding_random(ds, 4, 1, 1, &emb) == ELR_OK);
  elr_model* model = nullptr;
  CHECK(elr_model_train(ds, emb, R"({"batch_size": 0})", &model, nullptr) ==
        ELR_INVALID_ARGUMENT);
  CHECK(elr_model_train(ds, emb, "{oops", &model, nullptr) == ELR_INVALID_ARGUMENT);
  CHECK(model == nullptr);
  elr_dataset* single = nullptr;
  REQUIRE(elr_dataset_take_per_class(ds, 0, 20, &single) == ELR_OK);
  CHECK(elr_model_train(single, emb, kQuick, &model, nullptr) == ELR_DATA);
  CHECK(std::string(elr_last_error()).find("both classes") != std::string::npos);
  elr_dataset_free(single);
  elr_embedding_free(emb);
  elr_dataset_free(ds);
}

TEST_CASE("presets and gradient check") {
  char* preset = nullptr;
  REQUIRE(elr_preset_config("baseline-sota", 50, &preset) == ELR_OK);
  const json p = json::parse(Take(preset));
  CHECK(p["name"] == "baseline-sota");
  CHECK(p["network"]["activation"] == "sigmoid");

  char* report = nullptr;
  int passed = -1;
  REQUIRE(elr_gradcheck(R"({"trials": 3, "activations": ["sigmoid", "mlrelu-literal"]})",
                        &report, &passed) == ELR_OK);
  CHECK(passed == 1);
  CHECK(json::parse(Take(report))["kinds"].size() == 2);
  CHECK(elr_gradcheck(R"({"activations": ["tanh"]})", &report, &passed) ==
        ELR_INVALID_ARGUMENT);
}
