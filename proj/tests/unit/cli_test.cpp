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


#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "elreluwl/corpus.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path path;
  Scratch() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("elreluwl-cli-" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome Cli(const Scratch& dir, const std::string& args) {
  const fs::path out = dir.path / "stdout.txt";
  const fs::path err = dir.path / "stderr.txt";
  const std::string cmd = std::string("'") + ELRELUWL_CLI_PATH + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = Slurp(out);
  o.err = Slurp(err);
  return o;
}

std::string Q(const fs::path& p) { return "'" + p.string() + "'"; }

constexpr const char* kTrainFlags =
    " --widths 2,3 --maps 3 --max-epochs 3 --batch 10 --no-timing";

void Pipeline(const Scratch& dir, const fs::path& out) {
  const std::string o = " --out " + Q(out);
  REQUIRE(Cli(dir, "prepare --format synth --spec n=40,vocab=30,len=10,signal=0.9,seed=3" + o)
              .code == 0);
  REQUIRE(Cli(dir, "embed --dim 6 --epochs 2" + o).code == 0);
  REQUIRE(Cli(dir, std::string("train") + kTrainFlags + o).code == 0);
  REQUIRE(Cli(dir, "eval --no-timing --strata 2 --per-stratum 5" + o).code == 0);
  REQUIRE(Cli(dir, std::string("cv --folds 2") + kTrainFlags + o).code == 0);
  REQUIRE(Cli(dir, std::string("compare --seeds 1,2") + kTrainFlags + o).code == 0);
  REQUIRE(Cli(dir, "gradcheck --trials 2" + o).code == 0);
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  Scratch dir;
  CHECK(Cli(dir, "").code == 1);
  CHECK(Cli(dir, "frobnicate").code == 1);
  CHECK(Cli(dir, "prepare").code == 1);
  CHECK(Cli(dir, "prepare --format csv").code == 1);
  const Outcome bad_spec =
      Cli(dir, "prepare --format synth --spec n=abc --out " + Q(dir.path / "o"));
  CHECK(bad_spec.code == 1);
  CHECK_FALSE(bad_spec.err.empty());
  CHECK(Cli(dir, "--help").code == 0);
}

TEST_CASE("data errors exit 2 with a message") {
  Scratch dir;
  const Outcome missing =
      Cli(dir, "prepare --format polarity --path " + Q(dir.path / "nowhere") + " --out " +
                   Q(dir.path / "o"));
  CHECK(missing.code == 2);
  CHECK(missing.err.find("nowhere") != std::string::npos);
  const Outcome no_data = Cli(dir, "embed --out " + Q(dir.path / "empty"));
  CHECK(no_data.code == 2);
  CHECK(no_data.err.find("dataset.json") != std::string::npos);
  const Outcome no_model = Cli(dir, "eval --out " + Q(dir.path / "empty"));
  CHECK(no_model.code == 2);
}

TEST_CASE("prepare reads polarity and imdb sources") {
  Scratch dir;
  const fs::path root = dir.path / "polarity";
  fs::create_directories(root / "pos");
  fs::create_directories(root / "neg");
  std::ofstream(root / "pos" / "a.txt") << "Great movie!";
  std::ofstream(root / "pos" / "b.txt") << "Loved it.";
  std::ofstream(root / "neg" / "c.txt") << "Dull.";
  const fs::path out = dir.path / "p";
  REQUIRE(Cli(dir, "prepare --format polarity --path " + Q(root) + " --out " + Q(out)).code == 0);
  const json summary = json::parse(Slurp(out / "dataset_summary.json"));
  CHECK(summary["n"] == 3);
  CHECK(summary["class_counts"] == json::array({1, 2}));
  CHECK(summary["name"] == "polarity");

  const fs::path csv = dir.path / "imdb.csv";
  std::ofstream(csv) << "review,sentiment\n\"Good, really\",positive\nBad,negative\nOk,positive\n";
  const fs::path out2 = dir.path / "i";
  REQUIRE(Cli(dir, "prepare --format imdb --path " + Q(csv) + " --take 1,1 --name tiny --out " +
                       Q(out2))
              .code == 0);
  const json s2 = json::parse(Slurp(out2 / "dataset_summary.json"));
  CHECK(s2["n"] == 2);
  CHECK(s2["name"] == "tiny");
}

TEST_CASE("full pipeline writes schema-valid artifacts") {
  Scratch dir;
  const fs::path out = dir.path / "run";
  Pipeline(dir, out);
  for (const char* f : {"dataset.json", "embeddings.json", "model.json", "train_report.json",
                        "eval_report.json", "cv_report.json", "compare_report.json",
                        "gradcheck_report.json", "metrics.csv", "summary.csv", "report.md"}) {
    CHECK_MESSAGE(fs::exists(out / f), f);
  }
  for (const char* cmd : {"prepare", "embed", "train", "eval", "cv", "compare", "gradcheck"}) {
    const json m = json::parse(Slurp(out / "manifests" / (std::string(cmd) + ".json")));
    CHECK(m["schema"] == "elreluwl.manifest");
    CHECK(m["command"] == cmd);
  }
  const auto metrics = elreluwl::ParseCsv(Slurp(out / "metrics.csv"));
  REQUIRE(metrics.size() > 1);
  CHECK(metrics[0] == std::vector<std::string>{"run_id", "preset", "dataset", "epoch",
                                               "train_loss", "train_acc", "val_acc", "ms"});
  for (const auto& row : metrics) CHECK(row.size() == 8);
  const auto summary = elreluwl::ParseCsv(Slurp(out / "summary.csv"));
  std::vector<std::string> kinds;
  for (std::size_t r = 1; r < summary.size(); ++r) {
    CHECK(summary[r].size() == summary[0].size());
    kinds.push_back(summary[r][3]);
  }
  // train 1, eval 1 + 4 strata, cv 2 folds + aggregate, compare 2 seeds x 2.
  CHECK(summary.size() == 1 + 1 + 5 + 3 + 4);
  CHECK(std::count(kinds.begin(), kinds.end(), "aggregate") == 1);
  CHECK(std::count(kinds.begin(), kinds.end(), "compare") == 4);
  const std::string md = Slurp(out / "report.md");
  CHECK(md.find("# Results") == 0);
  CHECK(md.find("| Epoch |") != std::string::npos);
}

TEST_CASE("assertions exit 3") {
  Scratch dir;
  const fs::path out = dir.path / "run";
  const std::string o = " --out " + Q(out);
  REQUIRE(Cli(dir, "prepare --format synth --spec n=30,vocab=30,len=8,signal=0.9,seed=3" + o)
              .code == 0);
  REQUIRE(Cli(dir, "embed --dim 4 --epochs 1 --random" + o).code == 0);
  const Outcome fail =
      Cli(dir, std::string("train --assert --min-accuracy 1.01") + kTrainFlags + o);
  CHECK(fail.code == 3);
  CHECK(fail.err.find("assertion failed") != std::string::npos);
  CHECK(Cli(dir, std::string("train --assert --min-accuracy 0") + kTrainFlags + o).code == 0);
  CHECK(Cli(dir, "gradcheck --trials 2 --assert" + o).code == 0);
}

TEST_CASE("explicit flags override the preset with a warning") {
  Scratch dir;
  const fs::path out = dir.path / "run";
  const std::string o = " --out " + Q(out);
  REQUIRE(Cli(dir, "prepare --format synth --spec n=20,vocab=30,len=8,signal=0.9,seed=3" + o)
              .code == 0);
  REQUIRE(Cli(dir, "embed --dim 4 --epochs 1 --random" + o).code == 0);
  const Outcome r = Cli(dir, std::string("train --preset elreluwl --dropout 0.1") + kTrainFlags + o);
  REQUIRE(r.code == 0);
  CHECK(r.err.find("warning: --dropout") != std::string::npos);
  const json m = json::parse(Slurp(out / "manifests" / "train.json"));
  CHECK(m["resolved"]["train"]["network"]["dropout"] == 0.1);
  CHECK(m["resolved"]["train"]["network"]["maps_per_width"] == 3);
}

TEST_CASE("config files fill flags the command line leaves unset") {
  Scratch dir;
  const fs::path out = dir.path / "run";
  const std::string o = " --out " + Q(out);
  REQUIRE(Cli(dir, "prepare --format synth --spec n=20,vocab=30,len=8,signal=0.9,seed=3" + o)
              .code == 0);
  REQUIRE(Cli(dir, "embed --dim 4 --epochs 1 --random" + o).code == 0);
  const fs::path ini = dir.path / "train.ini";
  std::ofstream(ini) << "# quick\nmax-epochs = 1\nmaps = 2\nwidths = 2\nno_timing = true\n";
  REQUIRE(Cli(dir, "train --config " + Q(ini) + o).code == 0);
  json report = json::parse(Slurp(out / "train_report.json"));
  CHECK(report["report"]["history"].size() == 1);
  CHECK(report["report"]["total_ms"] == 0.0);

  REQUIRE(Cli(dir, "train --max-epochs 2 --epsilon 1 --patience 5 --config " + Q(ini) + o).code == 0);
  report = json::parse(Slurp(out / "train_report.json"));
  CHECK(report["report"]["history"].size() == 2);

  const fs::path js = dir.path / "train.json";
  std::ofstream(js) << R"({"max_epochs": 1, "maps": 2, "widths": [2]})";
  REQUIRE(Cli(dir, "train --config " + Q(js) + o).code == 0);
  CHECK(json::parse(Slurp(out / "train_report.json"))["report"]["history"].size() == 1);

  const fs::path bad = dir.path / "bad.ini";
  std::ofstream(bad) << "learning-speed = 3\n";
  CHECK(Cli(dir, "train --config " + Q(bad) + o).code == 1);
}

TEST_CASE("replaying the manifests reproduces every artifact byte for byte") {
  Scratch dir;
  const fs::path first = dir.path / "first";
  Pipeline(dir, first);
  const fs::path second = dir.path / "second";
  const Outcome r = Cli(dir, "replay " + Q(first / "manifests") + " --out " + Q(second));
  INFO(r.err);
  REQUIRE(r.code == 0);
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(first)) {
    if (!entry.is_regular_file()) continue;
    const fs::path name = entry.path().filename();
    INFO(name.string());
    REQUIRE(fs::exists(second / name));
    CHECK(Slurp(entry.path()) == Slurp(second / name));
    ++compared;
  }
  CHECK(compared >= 11);
  CHECK(Cli(dir, "replay " + Q(dir.path / "missing.json")).code != 0);
}
