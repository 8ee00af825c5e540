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

#include "elreluwl/serialize.hpp"

#include <fstream>
#include <sstream>

#include "elreluwl/error.hpp"
#include "json.hpp"

namespace elreluwl {

using nlohmann::json;

namespace {

json Parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    Fail(ErrorKind::kData, std::string(what) + ": invalid JSON: " + e.what());
  }
}

json Envelope(std::string_view schema) {
  return json{{"schema", schema}, {"version", kSchemaVersion}};
}

void CheckEnvelope(const json& j, std::string_view schema) {
  if (!j.is_object() || j.value("schema", "") != schema) {
    Fail(ErrorKind::kData, "expected a '" + std::string(schema) + "' document");
  }
  if (j.value("version", -1) != kSchemaVersion) {
    Fail(ErrorKind::kData, "unsupported " + std::string(schema) + " version");
  }
}

// Wraps nlohmann access errors as data errors.
template <typename Fn>
auto Guard(std::string_view what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    Fail(ErrorKind::kData, std::string(what) + ": " + e.what());
  }
}

json MatrixFlat(const Matrix& m) { return json(std::vector<double>(m.flat().begin(), m.flat().end())); }

Matrix MatrixFromFlat(const json& j, std::size_t rows, std::size_t cols, std::string_view what) {
  const auto flat = j.get<std::vector<double>>();
  if (flat.size() != rows * cols) {
    Fail(ErrorKind::kData, std::string(what) + " has " + std::to_string(flat.size()) +
                               " entries, expected " + std::to_string(rows * cols));
  }
  Matrix m(rows, cols);
  std::copy(flat.begin(), flat.end(), m.flat().begin());
  return m;
}

// ---- configs --------------------------------------------------------------

json ToJ(const NetworkConfig& c) {
  return {{"filter_widths", c.filter_widths},
          {"maps_per_width", c.maps_per_width},
          {"embedding_dim", c.embedding_dim},
          {"num_classes", c.num_classes},
          {"dropout", c.dropout},
          {"activation", ActivationName(c.activation.kind)},
          {"a", c.activation.a},
          {"seed", c.seed}};
}

NetworkConfig NetworkFromJ(const json& j, NetworkConfig c = {}) {
  if (j.contains("filter_widths")) c.filter_widths = j.at("filter_widths").get<std::vector<std::size_t>>();
  c.maps_per_width = j.value("maps_per_width", c.maps_per_width);
  c.embedding_dim = j.value("embedding_dim", c.embedding_dim);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.dropout = j.value("dropout", c.dropout);
  if (j.contains("activation")) c.activation.kind = ParseActivationKind(j.at("activation").get<std::string>());
  c.activation.a = j.value("a", c.activation.a);
  c.seed = j.value("seed", c.seed);
  return c;
}

json ToJ(const TrainConfig& c) {
  return {{"name", c.name},
          {"network", ToJ(c.network)},
          {"loss", LossModeName(c.loss)},
          {"learning_rate", c.learning_rate},
          {"loss_reduction", "sum"},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"epsilon", c.convergence.epsilon},
          {"patience", c.convergence.patience},
          {"validation_fraction", c.validation_fraction},
          {"seed", c.seed},
          {"record_timing", c.record_timing}};
}

TrainConfig TrainFromJ(const json& j, TrainConfig c) {
  c.name = j.value("name", c.name);
  if (j.contains("network")) c.network = NetworkFromJ(j.at("network"), c.network);
  if (j.contains("loss")) c.loss = ParseLossMode(j.at("loss").get<std::string>());
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.convergence.epsilon = j.value("epsilon", c.convergence.epsilon);
  c.convergence.patience = j.value("patience", c.convergence.patience);
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.seed = j.value("seed", c.seed);
  c.record_timing = j.value("record_timing", c.record_timing);
  return c;
}

// ---- reports --------------------------------------------------------------

json ToJ(const ClassWeights& w) { return json(std::vector<double>(w.weight.begin(), w.weight.end())); }

ClassWeights WeightsFromJ(const json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != kNumLabels) Fail(ErrorKind::kData, "class_weights must have 2 entries");
  ClassWeights w;
  std::copy(v.begin(), v.end(), w.weight.begin());
  return w;
}

template <typename T>
std::array<T, kNumLabels> Pair(const json& j) {
  const auto v = j.get<std::vector<T>>();
  if (v.size() != kNumLabels) Fail(ErrorKind::kData, "per-class arrays must have 2 entries");
  return {v[0], v[1]};
}

json ToJ(const EvalResult& r) {
  return {{"n_evaluated", r.n_evaluated},
          {"accuracy", r.accuracy},
          {"macro_accuracy", r.macro_accuracy()},
          {"per_class_accuracy", r.per_class_accuracy},
          {"class_counts", r.class_counts},
          {"confusion", {{"tp", r.confusion.tp}, {"tn", r.confusion.tn},
                         {"fp", r.confusion.fp}, {"fn", r.confusion.fn}}},
          {"mean_true_probability", r.mean_true_probability}};
}

EvalResult EvalFromJ(const json& j) {
  EvalResult r;
  r.n_evaluated = j.at("n_evaluated").get<std::size_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.per_class_accuracy = Pair<double>(j.at("per_class_accuracy"));
  r.class_counts = Pair<std::size_t>(j.at("class_counts"));
  const json& c = j.at("confusion");
  r.confusion = {c.at("tp").get<std::size_t>(), c.at("tn").get<std::size_t>(),
                 c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>()};
  r.mean_true_probability = j.value("mean_true_probability", 0.0);
  return r;
}

json ToJ(const TrainReport& r) {
  json history = json::array();
  for (const EpochRecord& e : r.history) {
    history.push_back({{"epoch", e.epoch},
                       {"train_loss", e.train_loss},
                       {"train_accuracy", e.train_accuracy},
                       {"validation_accuracy", e.validation_accuracy},
                       {"ms", e.ms}});
  }
  return {{"preset", r.preset},
          {"history", history},
          {"convergence_epoch", r.convergence_epoch},
          {"best_validation_accuracy", r.best_validation_accuracy},
          {"stopped_early", r.stopped_early},
          {"class_weights", ToJ(r.class_weights)},
          {"train_size", r.train_size},
          {"validation_size", r.validation_size},
          {"seed", r.seed},
          {"total_ms", r.total_ms}};
}

TrainReport TrainReportFromJ(const json& j) {
  TrainReport r;
  r.preset = j.at("preset").get<std::string>();
  for (const json& e : j.at("history")) {
    r.history.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(),
                         e.at("train_accuracy").get<double>(),
                         e.at("validation_accuracy").get<double>(), e.at("ms").get<double>()});
  }
  r.convergence_epoch = j.at("convergence_epoch").get<std::size_t>();
  r.best_validation_accuracy = j.at("best_validation_accuracy").get<double>();
  r.stopped_early = j.at("stopped_early").get<bool>();
  r.class_weights = WeightsFromJ(j.at("class_weights"));
  r.train_size = j.at("train_size").get<std::size_t>();
  r.validation_size = j.at("validation_size").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.total_ms = j.at("total_ms").get<double>();
  if (r.convergence_epoch > r.history.size()) {
    Fail(ErrorKind::kData, "convergence_epoch exceeds the recorded history");
  }
  return r;
}

json ToJ(const CvReport& r) {
  json folds = json::array();
  for (const FoldResult& f : r.folds) folds.push_back({{"train", ToJ(f.train)}, {"test", ToJ(f.test)}});
  return {{"preset", r.preset},
          {"k_folds", r.k_folds},
          {"seed", r.seed},
          {"folds", folds},
          {"mean_accuracy", r.mean_accuracy},
          {"std_accuracy", r.std_accuracy},
          {"mean_macro_accuracy", r.mean_macro_accuracy},
          {"mean_convergence_epoch", r.mean_convergence_epoch},
          {"std_convergence_epoch", r.std_convergence_epoch}};
}

CvReport CvFromJ(const json& j) {
  CvReport r;
  r.preset = j.at("preset").get<std::string>();
  r.k_folds = j.at("k_folds").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const json& f : j.at("folds")) {
    r.folds.push_back({TrainReportFromJ(f.at("train")), EvalFromJ(f.at("test"))});
  }
  if (r.folds.size() != r.k_folds) Fail(ErrorKind::kData, "fold count does not match k_folds");
  r.mean_accuracy = j.at("mean_accuracy").get<double>();
  r.std_accuracy = j.at("std_accuracy").get<double>();
  r.mean_macro_accuracy = j.at("mean_macro_accuracy").get<double>();
  r.mean_convergence_epoch = j.at("mean_convergence_epoch").get<double>();
  r.std_convergence_epoch = j.at("std_convergence_epoch").get<double>();
  return r;
}

json ToJ(const RunOutcome& o) { return {{"train", ToJ(o.train)}, {"test", ToJ(o.test)}}; }
RunOutcome OutcomeFromJ(const json& j) {
  return {TrainReportFromJ(j.at("train")), EvalFromJ(j.at("test"))};
}

json ToJ(const ComparisonReport& r) {
  json runs = json::array();
  for (const PairedRun& p : r.runs) {
    runs.push_back({{"seed", p.seed}, {"baseline", ToJ(p.baseline)}, {"proposed", ToJ(p.proposed)}});
  }
  return {{"baseline_name", r.baseline_name},
          {"proposed_name", r.proposed_name},
          {"minority_class", r.minority_class},
          {"runs", runs},
          {"accuracy_wins", r.accuracy_wins},
          {"accuracy_ties", r.accuracy_ties},
          {"convergence_wins", r.convergence_wins},
          {"convergence_ties", r.convergence_ties},
          {"minority_accuracy_wins", r.minority_accuracy_wins},
          {"minority_accuracy_ties", r.minority_accuracy_ties}};
}

ComparisonReport ComparisonFromJ(const json& j) {
  ComparisonReport r;
  r.baseline_name = j.at("baseline_name").get<std::string>();
  r.proposed_name = j.at("proposed_name").get<std::string>();
  r.minority_class = j.at("minority_class").get<int>();
  for (const json& p : j.at("runs")) {
    r.runs.push_back({p.at("seed").get<std::uint64_t>(), OutcomeFromJ(p.at("baseline")),
                      OutcomeFromJ(p.at("proposed"))});
  }
  r.accuracy_wins = j.at("accuracy_wins").get<std::size_t>();
  r.accuracy_ties = j.at("accuracy_ties").get<std::size_t>();
  r.convergence_wins = j.at("convergence_wins").get<std::size_t>();
  r.convergence_ties = j.at("convergence_ties").get<std::size_t>();
  r.minority_accuracy_wins = j.at("minority_accuracy_wins").get<std::size_t>();
  r.minority_accuracy_ties = j.at("minority_accuracy_ties").get<std::size_t>();
  return r;
}

json ToJ(const TimingStats& t) {
  return {{"measurements", t.measurements}, {"median_ms", t.median_ms}, {"mean_ms", t.mean_ms},
          {"min_ms", t.min_ms}, {"max_ms", t.max_ms}};
}

TimingStats TimingFromJ(const json& j) {
  return {j.at("measurements").get<std::size_t>(), j.at("median_ms").get<double>(),
          j.at("mean_ms").get<double>(), j.at("min_ms").get<double>(),
          j.at("max_ms").get<double>()};
}

json ToJ(const EvalRun& r) {
  json strata = json::array();
  for (const StratumResult& s : r.strata) {
    strata.push_back({{"label", s.label}, {"stratum", s.stratum}, {"members", s.members},
                      {"result", ToJ(s.result)}});
  }
  json j = {{"preset", r.preset}, {"overall", ToJ(r.overall)}, {"strata", strata}};
  j["timing"] = r.timing ? ToJ(*r.timing) : json(nullptr);
  return j;
}

EvalRun EvalRunFromJ(const json& j) {
  EvalRun r;
  r.preset = j.at("preset").get<std::string>();
  r.overall = EvalFromJ(j.at("overall"));
  for (const json& s : j.at("strata")) {
    r.strata.push_back({s.at("label").get<int>(), s.at("stratum").get<std::size_t>(),
                        s.at("members").get<std::vector<std::size_t>>(), EvalFromJ(s.at("result"))});
  }
  if (j.contains("timing") && !j.at("timing").is_null()) r.timing = TimingFromJ(j.at("timing"));
  return r;
}

}  // namespace

// ---- public API -----------------------------------------------------------

std::string DatasetToJson(const LabeledDataset& dataset, std::string_view name) {
  json j = Envelope("elreluwl.dataset");
  if (!name.empty()) j["name"] = name;
  json docs = json::array();
  for (const Document& d : dataset.documents()) {
    docs.push_back({{"id", d.source_id}, {"label", d.label}, {"tokens", d.tokens}});
  }
  j["class_counts"] = dataset.class_counts();
  j["documents"] = std::move(docs);
  return j.dump();
}

LabeledDataset DatasetFromJson(std::string_view text, std::string* name) {
  const json j = Parse(text, "dataset");
  CheckEnvelope(j, "elreluwl.dataset");
  return Guard("dataset", [&] {
    if (name != nullptr) *name = j.value("name", std::string());
    std::vector<Document> docs;
    for (const json& d : j.at("documents")) {
      docs.push_back({d.at("tokens").get<std::vector<std::string>>(), d.at("label").get<int>(),
                      d.at("id").get<std::string>()});
    }
    LabeledDataset ds(std::move(docs));
    if (j.contains("class_counts") && Pair<std::size_t>(j.at("class_counts")) != ds.class_counts()) {
      Fail(ErrorKind::kData, "dataset class_counts disagree with its documents");
    }
    return ds;
  });
}

std::string EmbeddingsToJson(const Embeddings& e) {
  json j = Envelope("elreluwl.embeddings");
  j["dim"] = e.table.dim();
  j["words"] = e.vocab.words();
  j["counts"] = e.vocab.counts();
  j["vectors"] = MatrixFlat(e.table.vectors);
  return j.dump();
}

Embeddings EmbeddingsFromJson(std::string_view text) {
  const json j = Parse(text, "embeddings");
  CheckEnvelope(j, "elreluwl.embeddings");
  return Guard("embeddings", [&] {
    const auto dim = j.at("dim").get<std::size_t>();
    if (dim == 0) Fail(ErrorKind::kData, "embedding dim must be positive");
    auto words = j.at("words").get<std::vector<std::string>>();
    std::vector<std::size_t> counts(words.size(), 0);
    if (j.contains("counts")) counts = j.at("counts").get<std::vector<std::size_t>>();
    const std::size_t rows = words.size();
    Vocabulary vocab(std::move(words), std::move(counts));
    EmbeddingTable table{MatrixFromFlat(j.at("vectors"), rows, dim, "embedding vectors")};
    return Embeddings{std::move(vocab), std::move(table)};
  });
}

std::string ModelToJson(const ModelParams& p, std::string_view embedding_ref) {
  json j = Envelope("elreluwl.model");
  j["config"] = ToJ(p.config);
  j["loss_reduction"] = "sum";
  json filters = json::array();
  for (const FilterBank& b : p.banks) {
    filters.push_back({{"width", b.width}, {"maps", b.weights.rows()},
                       {"weights", MatrixFlat(b.weights)}, {"bias", b.bias}});
  }
  j["filters"] = std::move(filters);
  j["fc_weights"] = MatrixFlat(p.fc_weights);
  j["fc_bias"] = p.fc_bias;
  j["embedding_ref"] = embedding_ref;
  return j.dump();
}

ModelParams ModelFromJson(std::string_view text) {
  const json j = Parse(text, "model");
  CheckEnvelope(j, "elreluwl.model");
  return Guard("model", [&] {
    const NetworkConfig cfg = NetworkFromJ(j.at("config"));
    ModelParams p = ModelParams::Zeros(cfg);
    const json& filters = j.at("filters");
    if (filters.size() != p.banks.size()) {
      Fail(ErrorKind::kData, "model has " + std::to_string(filters.size()) +
                                 " filter banks, config expects " + std::to_string(p.banks.size()));
    }
    for (std::size_t b = 0; b < p.banks.size(); ++b) {
      FilterBank& bank = p.banks[b];
      const json& f = filters[b];
      if (f.at("width").get<std::size_t>() != bank.width) {
        Fail(ErrorKind::kData, "filter bank " + std::to_string(b) + " width does not match config");
      }
      bank.weights = MatrixFromFlat(f.at("weights"), bank.weights.rows(), bank.weights.cols(),
                                    "filter weights");
      bank.bias = f.at("bias").get<std::vector<double>>();
    }
    p.fc_weights = MatrixFromFlat(j.at("fc_weights"), p.fc_weights.rows(), p.fc_weights.cols(),
                                  "fc_weights");
    p.fc_bias = j.at("fc_bias").get<std::vector<double>>();
    p.CheckConsistent();
    return p;
  });
}

std::string CbowConfigToJson(const CbowConfig& c) {
  return json{{"window", c.window}, {"dim", c.dim}, {"negatives", c.negatives},
              {"epochs", c.epochs}, {"learning_rate", c.learning_rate},
              {"min_count", c.min_count}, {"seed", c.seed}}
      .dump();
}

CbowConfig CbowConfigFromJson(std::string_view text) {
  const json j = Parse(text, "cbow config");
  return Guard("cbow config", [&] {
    CbowConfig c;
    c.window = j.value("window", c.window);
    c.dim = j.value("dim", c.dim);
    c.negatives = j.value("negatives", c.negatives);
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.min_count = j.value("min_count", c.min_count);
    c.seed = j.value("seed", c.seed);
    Validate(c);
    return c;
  });
}

std::string NetworkConfigToJson(const NetworkConfig& c) { return ToJ(c).dump(); }

std::string TrainConfigToJson(const TrainConfig& c) { return ToJ(c).dump(); }

TrainConfig TrainConfigFromJson(std::string_view text, const TrainConfig& defaults) {
  const json j = Parse(text, "train config");
  return Guard("train config", [&] {
    TrainConfig c = TrainFromJ(j, defaults);
    Validate(c);
    return c;
  });
}

std::string ReportItemToJson(const ReportItem& item) {
  return std::visit(
      [](const auto& run) {
        using T = std::decay_t<decltype(run)>;
        json j;
        if constexpr (std::is_same_v<T, TrainRun>) {
          j = Envelope("elreluwl.train_report");
          j["report"] = ToJ(run.report);
        } else if constexpr (std::is_same_v<T, CvRun>) {
          j = Envelope("elreluwl.cv_report");
          j["report"] = ToJ(run.report);
        } else if constexpr (std::is_same_v<T, ComparisonRun>) {
          j = Envelope("elreluwl.comparison_report");
          j["report"] = ToJ(run.report);
        } else {
          j = Envelope("elreluwl.eval_report");
          j["report"] = ToJ(run);
        }
        j["dataset"] = run.dataset;
        return j.dump(2);
      },
      item);
}

ReportItem ReportItemFromJson(std::string_view text) {
  const json j = Parse(text, "report");
  const std::string schema = j.is_object() ? j.value("schema", "") : "";
  CheckEnvelope(j, schema);
  return Guard("report", [&]() -> ReportItem {
    const std::string dataset = j.value("dataset", "");
    const json& r = j.at("report");
    if (schema == "elreluwl.train_report") return TrainRun{dataset, TrainReportFromJ(r)};
    if (schema == "elreluwl.cv_report") return CvRun{dataset, CvFromJ(r)};
    if (schema == "elreluwl.comparison_report") return ComparisonRun{dataset, ComparisonFromJ(r)};
    if (schema == "elreluwl.eval_report") {
      EvalRun run = EvalRunFromJ(r);
      run.dataset = dataset;
      return run;
    }
    Fail(ErrorKind::kData, "unknown report schema '" + schema + "'");
  });
}

std::string GradCheckReportToJson(const GradCheckReport& r) {
  json j = Envelope("elreluwl.gradcheck_report");
  j["h"] = r.h;
  j["tol"] = r.tol;
  j["passed"] = r.passed();
  j["flagged_blocks"] = r.flagged_blocks();
  json kinds = json::array();
  for (const KindCheck& k : r.kinds) {
    json blocks = json::array();
    for (const BlockError& b : k.blocks) {
      blocks.push_back({{"block", b.block}, {"max_rel_error", b.max_rel_error}, {"flagged", b.flagged}});
    }
    kinds.push_back({{"activation", ActivationName(k.kind)}, {"trials", k.trials},
                     {"skipped", k.skipped}, {"max_rel_error", k.max_rel_error()},
                     {"blocks", blocks}});
  }
  j["kinds"] = std::move(kinds);
  return j.dump(2);
}

std::string ReadTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteTextFile(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) Fail(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace elreluwl
