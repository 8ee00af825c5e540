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


// elreluwl command-line tool. Every subcommand reads and writes artifacts
// under --out and records a run manifest in <out>/manifests/ that `replay`
// can re-execute.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elreluwl/elreluwl.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitAssert = 3;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void Usage(const std::string& msg) { throw CliError{kExitUsage, msg}; }
[[noreturn]] void DataError(const std::string& msg) { throw CliError{kExitData, msg}; }

void Check(elr_status status) {
  if (status == ELR_OK) return;
  const int code = status == ELR_INVALID_ARGUMENT ? kExitUsage : kExitData;
  throw CliError{code, elr_last_error()};
}

struct StringFree {
  void operator()(char* s) const { elr_string_free(s); }
};
struct DatasetFree {
  void operator()(elr_dataset* d) const { elr_dataset_free(d); }
};
struct EmbeddingFree {
  void operator()(elr_embedding* e) const { elr_embedding_free(e); }
};
struct ModelFree {
  void operator()(elr_model* m) const { elr_model_free(m); }
};
using Dataset = std::unique_ptr<elr_dataset, DatasetFree>;
using Embedding = std::unique_ptr<elr_embedding, EmbeddingFree>;
using Model = std::unique_ptr<elr_model, ModelFree>;

std::string TakeString(char* s) {
  std::unique_ptr<char, StringFree> owned(s);
  return owned ? std::string(owned.get()) : std::string();
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) DataError("cannot write '" + path.string() + "'");
}

json ParseJson(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    DataError(what + ": " + e.what());
  }
}

// Accepts INI-style key=value files and flat JSON objects mirroring flags.
class FlagConfig : public CLI::ConfigINI {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream ini(text);
      return CLI::ConfigINI::from_config(ini);
    }
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      const auto push = [&](const json& v) {
        item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      };
      if (value.is_array()) {
        for (const json& v : value) push(v);
      } else {
        push(value);
      }
      items.push_back(std::move(item));
    }
    return items;
  }
};

// Fills options not given on the command line from the subcommand's --config
// file. Keys are long flag names; underscores are accepted for dashes.
void ApplyConfigFile(CLI::App& sub) {
  const CLI::Option* config = sub.get_option_no_throw("--config");
  if (config == nullptr || config->count() == 0) return;
  const std::string path = config->as<std::string>();
  std::ifstream in(path, std::ios::binary);
  if (!in) DataError("cannot open config '" + path + "'");
  std::vector<CLI::ConfigItem> items;
  try {
    items = FlagConfig().from_config(in);
  } catch (const CLI::Error& e) {
    Usage("config '" + path + "': " + e.what());
  }
  for (const CLI::ConfigItem& item : items) {
    std::string name = item.fullname();
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = sub.get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config" || name == "help") {
      Usage("config '" + path + "': unknown option '" + item.fullname() + "'");
    }
    if (opt->count() > 0) continue;
    try {
      if (opt->get_expected_max() == 0) {
        if (item.inputs.size() != 1) Usage("config '" + path + "': flag '" + name + "' takes one value");
        const std::string v = item.inputs.front();
        if (v == "true" || v == "1") {
          opt->add_result(std::string("true"));
        } else if (v != "false" && v != "0") {
          Usage("config '" + path + "': flag '" + name + "' must be true or false");
        } else {
          continue;
        }
      } else {
        for (const std::string& v : item.inputs) opt->add_result(v);
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      Usage("config '" + path + "': " + name + ": " + e.what());
    }
  }
}

// ---- artifacts -------------------------------------------------------------

struct Layout {
  fs::path out;
  fs::path dataset() const { return out / "dataset.json"; }
  fs::path embeddings() const { return out / "embeddings.json"; }
  fs::path model() const { return out / "model.json"; }
  fs::path report(const std::string& kind) const { return out / (kind + "_report.json"); }
  fs::path manifest(const std::string& command) const {
    return out / "manifests" / (command + ".json");
  }
};

// Report files folded into metrics.csv / summary.csv / report.md, in order.
constexpr const char* kReportKinds[] = {"train", "eval", "cv", "compare"};

void EmitReports(const Layout& layout) {
  std::vector<std::string> texts;
  for (const char* kind : kReportKinds) {
    const fs::path p = layout.report(kind);
    if (fs::exists(p)) texts.push_back(ReadFile(p));
  }
  std::vector<const char*> ptrs;
  for (const auto& t : texts) ptrs.push_back(t.c_str());
  Check(elr_emit_report(ptrs.data(), ptrs.size(), layout.out.string().c_str()));
}

Dataset LoadDataset(const fs::path& path) {
  if (!fs::exists(path)) DataError("dataset '" + path.string() + "' not found; run prepare first");
  elr_dataset* d = nullptr;
  Check(elr_dataset_load(path.string().c_str(), &d));
  return Dataset(d);
}

Embedding LoadEmbedding(const fs::path& path) {
  if (!fs::exists(path)) DataError("embeddings '" + path.string() + "' not found; run embed first");
  elr_embedding* e = nullptr;
  Check(elr_embedding_load(path.string().c_str(), &e));
  return Embedding(e);
}

Model LoadModel(const fs::path& path) {
  if (!fs::exists(path)) DataError("model '" + path.string() + "' not found; run train first");
  elr_model* m = nullptr;
  Check(elr_model_load(path.string().c_str(), &m));
  return Model(m);
}

// ---- manifests ---------------------------------------------------------------

// Options whose values are filesystem paths; recorded as absolute paths.
const std::vector<std::string> kPathOptions = {"--path", "--data",   "--embeddings", "--model",
                                               "--config", "--out", "--versus"};

json RecordArgs(const CLI::App& sub) {
  json args = json::array();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    const std::string name = "--" + opt->get_lnames().front();
    if (name == "--help" || name == "--config") continue;
    if (opt->get_expected_max() == 0) {
      if (opt->as<bool>()) args.push_back(json::array({name}));
      continue;
    }
    json entry = json::array({name});
    const bool is_path =
        std::find(kPathOptions.begin(), kPathOptions.end(), name) != kPathOptions.end();
    for (const std::string& r : opt->results()) {
      entry.push_back(is_path ? fs::absolute(r).lexically_normal().string() : r);
    }
    args.push_back(std::move(entry));
  }
  return args;
}

struct Manifest {
  Manifest(std::string cmd, json recorded, std::optional<std::string> config)
      : command(std::move(cmd)), args(std::move(recorded)), config_file(std::move(config)) {}

  std::string command;
  json args;
  std::optional<std::string> config_file;
  json resolved = json::object();
  json dataset;
  std::vector<std::uint64_t> seeds;
};

void WriteManifest(const Layout& layout, const Manifest& m) {
  json j{{"schema", "elreluwl.manifest"},
         {"version", 1},
         {"tool_version", elr_version()},
         {"command", m.command},
         {"args", m.args},
         {"config_file", m.config_file ? json(*m.config_file) : json(nullptr)},
         {"out_dir", fs::absolute(layout.out).lexically_normal().string()},
         {"dataset", m.dataset},
         {"seeds", m.seeds},
         {"resolved", m.resolved}};
  WriteFile(layout.manifest(m.command), j.dump(2) + "\n");
}

std::optional<std::string> ConfigFileOf(const CLI::App& sub) {
  const CLI::Option* opt = sub.get_option_no_throw("--config");
  if (opt == nullptr || opt->count() == 0) return std::nullopt;
  return fs::absolute(opt->as<std::string>()).lexically_normal().string();
}

// ---- training flags ----------------------------------------------------------

void Warn(const std::string& msg) { std::cerr << "warning: " << msg << "\n"; }

struct TrainFlags {
  double lr = 0.0;
  std::size_t batch = 0;
  double dropout = 0.0;
  double a = 0.0;
  std::string activation;
  std::string loss;
  std::size_t max_epochs = 0;
  std::uint64_t seed = 0;
  std::size_t maps = 0;
  std::vector<std::size_t> widths;
  double epsilon = 0.0;
  std::size_t patience = 0;
  double validation_fraction = 0.0;
  bool no_timing = false;

  struct Bound {
    CLI::Option* option;
    json::json_pointer pointer;
    std::function<json()> value;
  };
  std::vector<Bound> bound;

  void Add(CLI::App* sub) {
    const auto bind = [&](CLI::Option* o, const char* ptr, std::function<json()> v) {
      bound.push_back({o, json::json_pointer(ptr), std::move(v)});
    };
    bind(sub->add_option("--lr", lr, "Learning rate applied to the summed batch loss"),
         "/learning_rate", [this] { return json(lr); });
    bind(sub->add_option("--batch", batch, "Mini-batch size"), "/batch_size",
         [this] { return json(batch); });
    bind(sub->add_option("--dropout", dropout, "Dropout rate on pooled features"),
         "/network/dropout", [this] { return json(dropout); });
    bind(sub->add_option("--a", a, "Activation inflection parameter"), "/network/a",
         [this] { return json(a); });
    bind(sub->add_option("--activation", activation, "Activation function")
             ->check(CLI::IsMember(
                 {"sigmoid", "lrelu", "drelu", "mlrelu-literal", "mlrelu-continuous"})),
         "/network/activation", [this] { return json(activation); });
    bind(sub->add_option("--loss", loss, "Loss mode")
             ->check(CLI::IsMember({"weighted", "unweighted"})),
         "/loss", [this] { return json(loss); });
    bind(sub->add_option("--max-epochs", max_epochs, "Epoch cap"), "/max_epochs",
         [this] { return json(max_epochs); });
    bind(sub->add_option("--seed", seed, "Training seed"), "/seed",
         [this] { return json(seed); });
    bind(sub->add_option("--maps", maps, "Feature maps per filter width"),
         "/network/maps_per_width", [this] { return json(maps); });
    bind(sub->add_option("--widths", widths, "Filter widths, comma separated")->delimiter(','),
         "/network/filter_widths", [this] { return json(widths); });
    bind(sub->add_option("--epsilon", epsilon, "Convergence improvement threshold"),
         "/epsilon", [this] { return json(epsilon); });
    bind(sub->add_option("--patience", patience, "Epochs without improvement before stopping"),
         "/patience", [this] { return json(patience); });
    bind(sub->add_option("--validation-fraction", validation_fraction,
                         "Share of the training portion held out for validation"),
         "/validation_fraction", [this] { return json(validation_fraction); });
    sub->add_flag("--no-timing", no_timing, "Report all wall-clock fields as 0");
  }

  // Overrides preset values with explicitly given flags, warning on conflicts.
  json Apply(json config) const {
    const std::string preset = config.value("name", std::string("custom"));
    for (const Bound& b : bound) {
      if (b.option->count() == 0) continue;
      const json v = b.value();
      if (config.contains(b.pointer) && config.at(b.pointer) != v) {
        Warn(b.option->get_name() + " " + (v.is_string() ? v.get<std::string>() : v.dump()) +
             " overrides preset " + preset + " (" + config.at(b.pointer).dump() + ")");
      }
      config[b.pointer] = v;
    }
    if (no_timing) config["record_timing"] = false;
    return config;
  }
};

json PresetConfig(const std::string& name, std::size_t dim) {
  char* text = nullptr;
  Check(elr_preset_config(name.c_str(), dim, &text));
  return ParseJson(TakeString(text), "preset config");
}

// A preset name, or a JSON train config file whose missing keys come from the
// preset named by its "name" (or the elreluwl preset).
json ResolveConfig(const std::string& spec, std::size_t dim) {
  if (spec == "baseline-sota" || spec == "elreluwl") return PresetConfig(spec, dim);
  if (!fs::exists(spec)) Usage("'" + spec + "' is neither a preset nor a config file");
  json file = ParseJson(ReadFile(spec), "config '" + spec + "'");
  if (!file.is_object()) DataError("config '" + spec + "' must be a JSON object");
  const std::string base = file.value("name", std::string("elreluwl"));
  json config = PresetConfig(base == "baseline-sota" ? base : "elreluwl", dim);
  config.merge_patch(file);
  config["network"]["embedding_dim"] = dim;
  return config;
}

// ---- subcommands -----------------------------------------------------------

struct SynthArgs {
  std::size_t n = 200;
  std::size_t vocab = 50;
  std::size_t len = 30;
  double signal = 1.0;
  std::uint64_t seed = 7;
};

SynthArgs ParseSynthSpec(const std::string& spec) {
  SynthArgs s;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) Usage("--spec entry '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "n") {
        s.n = std::stoull(value, &used);
      } else if (key == "vocab") {
        s.vocab = std::stoull(value, &used);
      } else if (key == "len") {
        s.len = std::stoull(value, &used);
      } else if (key == "signal") {
        s.signal = std::stod(value, &used);
      } else if (key == "seed") {
        s.seed = std::stoull(value, &used);
      } else {
        Usage("unknown --spec key '" + key + "' (expected n, vocab, len, signal, seed)");
      }
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      Usage("--spec value for '" + key + "' is not a number: '" + value + "'");
    }
  }
  return s;
}

struct Context {
  Layout layout;
  CLI::App* sub = nullptr;
};

struct PrepareArgs {
  std::string format;
  std::string path;
  std::string spec;
  std::vector<std::size_t> take;
  std::string name;
};

int RunPrepare(const Context& ctx, const PrepareArgs& a) {
  Manifest m{"prepare", RecordArgs(*ctx.sub), std::nullopt};
  m.dataset = {{"format", a.format}};
  elr_dataset* raw = nullptr;
  if (a.format == "synth") {
    const SynthArgs s = ParseSynthSpec(a.spec);
    m.dataset["spec"] = {{"n", s.n}, {"vocab", s.vocab}, {"len", s.len},
                         {"signal", s.signal}, {"seed", s.seed}};
    m.seeds = {s.seed};
    WriteManifest(ctx.layout, m);
    Check(elr_dataset_synth(s.n, s.vocab, s.len, s.signal, s.seed, &raw));
  } else {
    if (a.path.empty()) Usage("--path is required for --format " + a.format);
    m.dataset["path"] = fs::absolute(a.path).lexically_normal().string();
    WriteManifest(ctx.layout, m);
    if (a.format == "polarity") {
      Check(elr_dataset_load_polarity(a.path.c_str(), &raw));
    } else {
      Check(elr_dataset_load_imdb(a.path.c_str(), -1, -1, &raw));
    }
  }
  Dataset ds(raw);
  if (!a.take.empty()) {
    if (a.take.size() != 2) Usage("--take expects NEG,POS");
    elr_dataset* subset = nullptr;
    Check(elr_dataset_take_per_class(ds.get(), a.take[0], a.take[1], &subset));
    ds.reset(subset);
  }
  if (!a.name.empty()) Check(elr_dataset_set_name(ds.get(), a.name.c_str()));
  Check(elr_dataset_save(ds.get(), ctx.layout.dataset().string().c_str()));
  char* summary = nullptr;
  Check(elr_dataset_summary_json(ds.get(), &summary));
  const json s = ParseJson(TakeString(summary), "summary");
  std::cout << "dataset " << s.at("name").get<std::string>() << ": n=" << s.at("n")
            << " negative=" << s.at("class_counts").at(0)
            << " positive=" << s.at("class_counts").at(1) << " min_len=" << s.at("min_length")
            << " max_len=" << s.at("max_length") << " mean_len=" << s.at("mean_length") << "\n";
  WriteFile(ctx.layout.out / "dataset_summary.json", s.dump(2) + "\n");
  std::cout << "wrote " << ctx.layout.dataset().string() << "\n";
  return kExitOk;
}

struct EmbedArgs {
  std::string data;
  std::size_t dim = 200;
  std::size_t window = 2;
  std::size_t epochs = 5;
  std::size_t negatives = 5;
  double lr = 0.025;
  std::size_t min_count = 1;
  std::uint64_t seed = 1;
  bool random = false;
};

int RunEmbed(const Context& ctx, const EmbedArgs& a) {
  const fs::path data = a.data.empty() ? ctx.layout.dataset() : fs::path(a.data);
  Dataset ds = LoadDataset(data);
  const json cbow{{"window", a.window}, {"dim", a.dim},       {"negatives", a.negatives},
                  {"epochs", a.epochs}, {"learning_rate", a.lr}, {"min_count", a.min_count},
                  {"seed", a.seed}};
  Manifest m{"embed", RecordArgs(*ctx.sub), std::nullopt};
  m.dataset = {{"path", fs::absolute(data).lexically_normal().string()}};
  m.seeds = {a.seed};
  m.resolved = a.random ? json{{"random", true}, {"dim", a.dim}, {"min_count", a.min_count},
                               {"seed", a.seed}}
                        : json{{"cbow", cbow}};
  WriteManifest(ctx.layout, m);

  elr_embedding* raw = nullptr;
  if (a.random) {
    Check(elr_embedding_random(ds.get(), a.dim, a.min_count, a.seed, &raw));
  } else {
    char* objective = nullptr;
    Check(elr_embedding_train(ds.get(), cbow.dump().c_str(), &raw, &objective));
    const json obj = ParseJson(TakeString(objective), "objective");
    for (std::size_t i = 0; i < obj.size(); ++i) {
      std::cout << "cbow epoch " << (i + 1) << " objective " << obj.at(i).get<double>() << "\n";
    }
  }
  Embedding emb(raw);
  Check(elr_embedding_save(emb.get(), ctx.layout.embeddings().string().c_str()));
  std::cout << "wrote " << ctx.layout.embeddings().string() << " (vocab "
            << elr_embedding_vocab_size(emb.get()) << ", dim " << elr_embedding_dim(emb.get())
            << ")\n";
  return kExitOk;
}

struct ModelArgs {
  std::string data;
  std::string embeddings;
  std::string preset = "elreluwl";
  bool assert_thresholds = false;
  double min_accuracy = 0.0;
};

fs::path DataPath(const Context& ctx, const ModelArgs& a) {
  return a.data.empty() ? ctx.layout.dataset() : fs::path(a.data);
}
fs::path EmbeddingPath(const Context& ctx, const ModelArgs& a) {
  return a.embeddings.empty() ? ctx.layout.embeddings() : fs::path(a.embeddings);
}

void Report(const std::string& line) { std::cout << line << "\n"; }

std::string Fixed(double v, int digits = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

int AssertResult(bool ok, const std::string& what) {
  if (ok) {
    Report("assert ok: " + what);
    return kExitOk;
  }
  std::cerr << "assertion failed: " << what << "\n";
  return kExitAssert;
}

int RunTrain(const Context& ctx, const ModelArgs& a, const TrainFlags& flags) {
  Dataset ds = LoadDataset(DataPath(ctx, a));
  Embedding emb = LoadEmbedding(EmbeddingPath(ctx, a));
  const json config = flags.Apply(ResolveConfig(a.preset, elr_embedding_dim(emb.get())));
  Manifest m{"train", RecordArgs(*ctx.sub), ConfigFileOf(*ctx.sub)};
  m.dataset = {{"path", fs::absolute(DataPath(ctx, a)).lexically_normal().string()},
               {"embeddings", fs::absolute(EmbeddingPath(ctx, a)).lexically_normal().string()}};
  m.seeds = {config.at("seed").get<std::uint64_t>()};
  m.resolved = {{"train", config}};
  WriteManifest(ctx.layout, m);

  elr_model* raw = nullptr;
  char* report_text = nullptr;
  Check(elr_model_train(ds.get(), emb.get(), config.dump().c_str(), &raw, &report_text));
  Model model(raw);
  const std::string report = TakeString(report_text);
  Check(elr_model_save(model.get(), ctx.layout.model().string().c_str(), "embeddings.json"));
  WriteFile(ctx.layout.report("train"), report);
  EmitReports(ctx.layout);

  const json r = ParseJson(report, "train report").at("report");
  for (const json& e : r.at("history")) {
    Report("epoch " + e.at("epoch").dump() + " loss " + Fixed(e.at("train_loss")) +
           " train_acc " + Fixed(e.at("train_accuracy")) + " val_acc " +
           Fixed(e.at("validation_accuracy")));
  }
  const double best = r.at("best_validation_accuracy");
  Report("convergence epoch " + r.at("convergence_epoch").dump() + ", best validation accuracy " +
         Fixed(best));
  if (a.assert_thresholds) {
    return AssertResult(best >= a.min_accuracy,
                        "best validation accuracy " + Fixed(best) + " >= " + Fixed(a.min_accuracy));
  }
  return kExitOk;
}

struct EvalArgs {
  std::string model;
  std::size_t strata = 0;
  std::size_t per_stratum = 10;
  std::uint64_t seed = 1;
  std::size_t timing_samples = 100;
  std::size_t repeats = 5;
  std::size_t warmup = 3;
  bool no_timing = false;
  std::string label = "model";
  std::string versus;
};

int RunEval(const Context& ctx, const ModelArgs& a, const EvalArgs& e) {
  const fs::path model_path = e.model.empty() ? ctx.layout.model() : fs::path(e.model);
  Model model = LoadModel(model_path);
  Embedding emb = LoadEmbedding(EmbeddingPath(ctx, a));
  Dataset ds = LoadDataset(DataPath(ctx, a));
  const json options{{"preset", e.label},         {"strata", e.strata},
                     {"per_stratum", e.per_stratum}, {"seed", e.seed},
                     {"timing", !e.no_timing},    {"timing_samples", e.timing_samples},
                     {"warmup", e.warmup},        {"repeats", e.repeats}};
  Manifest m{"eval", RecordArgs(*ctx.sub), std::nullopt};
  m.dataset = {{"path", fs::absolute(DataPath(ctx, a)).lexically_normal().string()},
               {"embeddings", fs::absolute(EmbeddingPath(ctx, a)).lexically_normal().string()},
               {"model", fs::absolute(model_path).lexically_normal().string()}};
  m.seeds = {e.seed};
  m.resolved = {{"eval", options}};
  WriteManifest(ctx.layout, m);

  char* report_text = nullptr;
  Check(elr_evaluate(model.get(), emb.get(), ds.get(), options.dump().c_str(), &report_text));
  const std::string report = TakeString(report_text);
  WriteFile(ctx.layout.report("eval"), report);
  EmitReports(ctx.layout);

  const json r = ParseJson(report, "eval report").at("report");
  const double accuracy = r.at("overall").at("accuracy");
  Report("accuracy " + Fixed(accuracy) + " macro " +
         Fixed(r.at("overall").at("macro_accuracy")) + " on " +
         r.at("overall").at("n_evaluated").dump() + " documents");
  if (r.contains("timing") && !r.at("timing").is_null()) {
    Report("median inference " + Fixed(r.at("timing").at("median_ms"), 4) + " ms");
  }
  if (!e.versus.empty() && !e.no_timing) {
    Model other = LoadModel(e.versus);
    char* pair_text = nullptr;
    Check(elr_time_pair(other.get(), model.get(), emb.get(), ds.get(), e.timing_samples,
                        e.warmup, e.repeats, &pair_text));
    const json pair = ParseJson(TakeString(pair_text), "paired timing");
    WriteFile(ctx.layout.out / "timing_pair.json", pair.dump(2) + "\n");
    Report("median inference " + Fixed(pair.at("proposed").at("median_ms")) + " ms vs " +
           Fixed(pair.at("baseline").at("median_ms")) + " ms for " + e.versus + " (ratio " +
           Fixed(pair.at("median_ratio"), 3) + ")");
  }
  if (a.assert_thresholds) {
    return AssertResult(accuracy >= a.min_accuracy,
                        "accuracy " + Fixed(accuracy) + " >= " + Fixed(a.min_accuracy));
  }
  return kExitOk;
}

int RunCv(const Context& ctx, const ModelArgs& a, const TrainFlags& flags, std::size_t folds,
          std::uint64_t cv_seed) {
  Dataset ds = LoadDataset(DataPath(ctx, a));
  Embedding emb = LoadEmbedding(EmbeddingPath(ctx, a));
  const json config = flags.Apply(ResolveConfig(a.preset, elr_embedding_dim(emb.get())));
  Manifest m{"cv", RecordArgs(*ctx.sub), ConfigFileOf(*ctx.sub)};
  m.dataset = {{"path", fs::absolute(DataPath(ctx, a)).lexically_normal().string()},
               {"embeddings", fs::absolute(EmbeddingPath(ctx, a)).lexically_normal().string()}};
  m.seeds = {cv_seed};
  m.resolved = {{"train", config}, {"folds", folds}};
  WriteManifest(ctx.layout, m);

  char* report_text = nullptr;
  Check(elr_cross_validate(ds.get(), emb.get(), config.dump().c_str(), folds, cv_seed,
                           &report_text));
  const std::string report = TakeString(report_text);
  WriteFile(ctx.layout.report("cv"), report);
  EmitReports(ctx.layout);

  const json r = ParseJson(report, "cv report").at("report");
  std::size_t f = 0;
  for (const json& fold : r.at("folds")) {
    Report("fold " + std::to_string(f++) + " accuracy " + Fixed(fold.at("test").at("accuracy")) +
           " convergence epoch " + fold.at("train").at("convergence_epoch").dump());
  }
  const double mean = r.at("mean_accuracy");
  Report("mean accuracy " + Fixed(mean) + " (std " + Fixed(r.at("std_accuracy")) +
         "), mean convergence epoch " + Fixed(r.at("mean_convergence_epoch"), 2));
  if (a.assert_thresholds) {
    return AssertResult(mean >= a.min_accuracy,
                        "mean accuracy " + Fixed(mean) + " >= " + Fixed(a.min_accuracy));
  }
  return kExitOk;
}

struct CompareArgs {
  std::string baseline = "baseline-sota";
  std::string proposed = "elreluwl";
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::string metric = "convergence";
  std::optional<std::size_t> min_wins;
};

int RunCompare(const Context& ctx, const ModelArgs& a, const TrainFlags& flags,
               const CompareArgs& c) {
  Dataset ds = LoadDataset(DataPath(ctx, a));
  Embedding emb = LoadEmbedding(EmbeddingPath(ctx, a));
  const std::size_t dim = elr_embedding_dim(emb.get());
  const json baseline = flags.Apply(ResolveConfig(c.baseline, dim));
  const json proposed = flags.Apply(ResolveConfig(c.proposed, dim));
  Manifest m{"compare", RecordArgs(*ctx.sub), ConfigFileOf(*ctx.sub)};
  m.dataset = {{"path", fs::absolute(DataPath(ctx, a)).lexically_normal().string()},
               {"embeddings", fs::absolute(EmbeddingPath(ctx, a)).lexically_normal().string()}};
  m.seeds = c.seeds;
  m.resolved = {{"baseline", baseline}, {"proposed", proposed}};
  WriteManifest(ctx.layout, m);

  char* report_text = nullptr;
  Check(elr_compare(ds.get(), emb.get(), baseline.dump().c_str(), proposed.dump().c_str(),
                    c.seeds.data(), c.seeds.size(), &report_text));
  const std::string report = TakeString(report_text);
  WriteFile(ctx.layout.report("compare"), report);
  EmitReports(ctx.layout);

  const json r = ParseJson(report, "comparison report").at("report");
  const int minority = r.at("minority_class");
  for (const json& run : r.at("runs")) {
    const json& b = run.at("baseline");
    const json& p = run.at("proposed");
    Report("seed " + run.at("seed").dump() + ": accuracy " + Fixed(b.at("test").at("accuracy")) +
           " vs " + Fixed(p.at("test").at("accuracy")) + ", convergence epoch " +
           b.at("train").at("convergence_epoch").dump() + " vs " +
           p.at("train").at("convergence_epoch").dump() + ", minority accuracy " +
           Fixed(b.at("test").at("per_class_accuracy").at(minority)) + " vs " +
           Fixed(p.at("test").at("per_class_accuracy").at(minority)));
  }
  const auto wins = [&](const char* key) { return r.at(key).get<std::size_t>(); };
  Report("proposed wins: accuracy " + std::to_string(wins("accuracy_wins")) + ", convergence " +
         std::to_string(wins("convergence_wins")) + ", minority accuracy " +
         std::to_string(wins("minority_accuracy_wins")) + " of " +
         std::to_string(c.seeds.size()) + " seeds");
  if (a.assert_thresholds) {
    const std::size_t need =
        c.min_wins.value_or(static_cast<std::size_t>(std::ceil(0.8 * c.seeds.size())));
    std::size_t got = 0;
    if (c.metric == "accuracy") {
      got = wins("accuracy_wins");
    } else if (c.metric == "minority") {
      got = wins("minority_accuracy_wins");
    } else {
      // Fewer or equal epochs counts for convergence speed.
      got = wins("convergence_wins") + wins("convergence_ties");
    }
    return AssertResult(got >= need, c.metric + " wins " + std::to_string(got) +
                                         " >= " + std::to_string(need));
  }
  return kExitOk;
}

struct GradcheckArgs {
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  double a = 0.03;
  std::vector<std::string> activations;
  bool assert_pass = false;
};

int RunGradcheck(const Context& ctx, const GradcheckArgs& g) {
  json options{{"trials", g.trials}, {"seed", g.seed}, {"a", g.a}};
  if (!g.activations.empty()) options["activations"] = g.activations;
  Manifest m{"gradcheck", RecordArgs(*ctx.sub), std::nullopt};
  m.dataset = nullptr;
  m.seeds = {g.seed};
  m.resolved = {{"gradcheck", options}};
  WriteManifest(ctx.layout, m);

  char* report_text = nullptr;
  int passed = 0;
  Check(elr_gradcheck(options.dump().c_str(), &report_text, &passed));
  const std::string report = TakeString(report_text);
  WriteFile(ctx.layout.report("gradcheck"), report);
  const json r = ParseJson(report, "gradcheck report");
  for (const json& k : r.at("kinds")) {
    Report(k.at("activation").get<std::string>() + ": trials " + k.at("trials").dump() +
           " skipped " + k.at("skipped").dump() + " max relative error " +
           k.at("max_rel_error").dump());
  }
  Report(std::string("gradient check ") + (passed ? "passed" : "FAILED") + " (tol " +
         r.at("tol").dump() + ")");
  if (g.assert_pass) return AssertResult(passed == 1, "all gradient blocks within tolerance");
  return kExitOk;
}

// ---- replay ------------------------------------------------------------------

int Dispatch(std::vector<std::string> args);

constexpr const char* kPipelineOrder[] = {"prepare", "embed", "train", "eval",
                                          "cv",      "compare", "gradcheck"};

std::vector<fs::path> ManifestFiles(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const std::string& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) {
      for (const char* cmd : kPipelineOrder) {
        const fs::path f = p / (std::string(cmd) + ".json");
        if (fs::exists(f)) files.push_back(f);
      }
    } else {
      if (!fs::exists(p)) DataError("manifest '" + in + "' not found");
      files.push_back(p);
    }
  }
  if (files.empty()) DataError("no manifests found");
  return files;
}

// Rebases `value` from old_root to new_root when it lies under old_root.
std::string Rebase(const std::string& value, const fs::path& old_root, const fs::path& new_root) {
  const fs::path rel = fs::path(value).lexically_relative(old_root);
  if (rel.empty() || *rel.begin() == "..") return value;
  return (new_root / rel).lexically_normal().string();
}

int RunReplay(const std::vector<std::string>& inputs, const std::string& out) {
  for (const fs::path& file : ManifestFiles(inputs)) {
    const json m = ParseJson(ReadFile(file), "manifest '" + file.string() + "'");
    if (m.value("schema", "") != "elreluwl.manifest") {
      DataError("'" + file.string() + "' is not a run manifest");
    }
    if (m.value("tool_version", "") != elr_version()) {
      Warn("manifest written by version " + m.value("tool_version", std::string("?")) +
           ", replaying with " + elr_version());
    }
    const fs::path old_root = m.at("out_dir").get<std::string>();
    const fs::path new_root =
        out.empty() ? old_root : fs::absolute(out).lexically_normal();
    std::vector<std::string> argv{m.at("command").get<std::string>()};
    bool has_out = false;
    for (const json& entry : m.at("args")) {
      const std::string name = entry.at(0);
      argv.push_back(name);
      has_out = has_out || name == "--out";
      for (std::size_t i = 1; i < entry.size(); ++i) {
        argv.push_back(Rebase(entry.at(i).get<std::string>(), old_root, new_root));
      }
    }
    if (!has_out) {
      argv.push_back("--out");
      argv.push_back(new_root.string());
    }
    std::cerr << "replaying " << file.string() << "\n";
    const int code = Dispatch(argv);
    if (code != kExitOk) return code;
    if (!m.at("config_file").is_null()) {
      // Config values were captured as explicit flags; confirm the replay resolved the same.
      const json replayed = ParseJson(
          ReadFile(Layout{new_root}.manifest(m.at("command"))), "replayed manifest");
      if (replayed.at("resolved") != m.at("resolved")) {
        DataError("replay of " + file.string() + " resolved a different configuration");
      }
    }
  }
  return kExitOk;
}

// ---- entry point -------------------------------------------------------------

int Dispatch(std::vector<std::string> args) {
  CLI::App app{"elreluwl: CNN sentiment classification with modified leaky ReLU and weighted loss"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(elr_version()));

  std::string out = ".";
  const auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Artifact directory")->capture_default_str();
  };
  const auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", "Flag values as key=value lines or a JSON object")
        ->check(CLI::ExistingFile);
  };

  PrepareArgs prep;
  CLI::App* prepare = app.add_subcommand("prepare", "Load a dataset and write its tokenized form");
  prepare->add_option("--format", prep.format, "Dataset format")
      ->required()
      ->check(CLI::IsMember({"polarity", "imdb", "synth"}));
  prepare->add_option("--path", prep.path, "Polarity directory or IMDB CSV file");
  prepare->add_option("--spec", prep.spec, "Synthetic corpus: n=,vocab=,len=,signal=,seed=");
  prepare->add_option("--take", prep.take, "Keep the first NEG,POS documents per class")
      ->delimiter(',');
  prepare->add_option("--name", prep.name, "Dataset label used in reports");
  add_out(prepare);

  EmbedArgs emb;
  CLI::App* embed = app.add_subcommand("embed", "Train CBOW embeddings or draw random ones");
  embed->add_option("--data", emb.data, "Prepared dataset (default <out>/dataset.json)");
  embed->add_option("--dim", emb.dim, "Embedding dimension")->capture_default_str();
  embed->add_option("--window", emb.window, "Context window radius")->capture_default_str();
  embed->add_option("--epochs", emb.epochs, "CBOW epochs")->capture_default_str();
  embed->add_option("--negatives", emb.negatives, "Negative samples per pair")
      ->capture_default_str();
  embed->add_option("--lr", emb.lr, "CBOW learning rate")->capture_default_str();
  embed->add_option("--min-count", emb.min_count, "Minimum word count")->capture_default_str();
  embed->add_option("--seed", emb.seed, "Seed")->capture_default_str();
  embed->add_flag("--random", emb.random, "Random embeddings instead of CBOW");
  add_out(embed);

  const auto add_model_inputs = [&](CLI::App* sub, ModelArgs& m, bool with_preset) {
    sub->add_option("--data", m.data, "Prepared dataset (default <out>/dataset.json)");
    sub->add_option("--embeddings", m.embeddings, "Embeddings (default <out>/embeddings.json)");
    if (with_preset) {
      sub->add_option("--preset", m.preset, "Preset name or JSON train config file")
          ->capture_default_str();
    }
    sub->add_flag("--assert", m.assert_thresholds, "Exit 3 when a threshold is violated");
    sub->add_option("--min-accuracy", m.min_accuracy, "Accuracy threshold for --assert")
        ->capture_default_str();
    add_out(sub);
  };

  ModelArgs train_args;
  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train a CNN classifier");
  add_model_inputs(train, train_args, true);
  train_flags.Add(train);
  add_config(train);

  ModelArgs eval_args;
  EvalArgs eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a trained model");
  add_model_inputs(eval, eval_args, false);
  eval->add_option("--model", eval_opts.model, "Model (default <out>/model.json)");
  eval->add_option("--strata", eval_opts.strata, "Sampled groups per class")
      ->capture_default_str();
  eval->add_option("--per-stratum", eval_opts.per_stratum, "Documents per group")
      ->capture_default_str();
  eval->add_option("--seed", eval_opts.seed, "Sampling seed")->capture_default_str();
  eval->add_option("--timing-samples", eval_opts.timing_samples, "Documents timed")
      ->capture_default_str();
  eval->add_option("--repeats", eval_opts.repeats, "Timed calls per document")
      ->capture_default_str();
  eval->add_option("--warmup", eval_opts.warmup, "Untimed warmup calls")->capture_default_str();
  eval->add_option("--label", eval_opts.label, "Run label in reports")->capture_default_str();
  eval->add_flag("--no-timing", eval_opts.no_timing, "Skip inference timing");
  eval->add_option("--versus", eval_opts.versus,
                   "Second model timed on the same documents for a paired ratio");

  ModelArgs cv_args;
  TrainFlags cv_flags;
  std::size_t folds = 5;
  std::uint64_t cv_seed = 42;
  CLI::App* cv = app.add_subcommand("cv", "Stratified k-fold cross-validation");
  add_model_inputs(cv, cv_args, true);
  cv_flags.Add(cv);
  cv->add_option("--folds", folds, "Number of folds")->capture_default_str();
  cv->add_option("--cv-seed", cv_seed, "Fold assignment seed")->capture_default_str();
  add_config(cv);

  ModelArgs cmp_args;
  TrainFlags cmp_flags;
  CompareArgs cmp;
  CLI::App* compare = app.add_subcommand("compare", "Paired baseline vs proposed runs over seeds");
  add_model_inputs(compare, cmp_args, false);
  cmp_flags.Add(compare);
  compare->add_option("--baseline", cmp.baseline, "Preset name or JSON train config file")
      ->capture_default_str();
  compare->add_option("--proposed", cmp.proposed, "Preset name or JSON train config file")
      ->capture_default_str();
  compare->add_option("--seeds", cmp.seeds, "Seeds, comma separated")->delimiter(',');
  compare->add_option("--metric", cmp.metric, "Metric checked by --assert")
      ->check(CLI::IsMember({"accuracy", "convergence", "minority"}))
      ->capture_default_str();
  compare->add_option("--min-wins", cmp.min_wins, "Wins required by --assert (default 80%)");
  add_config(compare);

  GradcheckArgs gc;
  CLI::App* gradcheck =
      app.add_subcommand("gradcheck", "Compare analytic gradients with finite differences");
  gradcheck->add_option("--trials", gc.trials, "Fixtures per activation")->capture_default_str();
  gradcheck->add_option("--seed", gc.seed, "Seed")->capture_default_str();
  gradcheck->add_option("--a", gc.a, "Activation inflection parameter")->capture_default_str();
  gradcheck->add_option("--activation", gc.activations, "Restrict to these activations")
      ->check(CLI::IsMember({"sigmoid", "lrelu", "drelu", "mlrelu-literal", "mlrelu-continuous"}));
  gradcheck->add_flag("--assert", gc.assert_pass, "Exit 3 when any block is flagged");
  add_out(gradcheck);

  std::vector<std::string> replay_inputs;
  std::string replay_out;
  CLI::App* replay = app.add_subcommand("replay", "Re-run commands recorded in manifests");
  replay->add_option("manifests", replay_inputs, "Manifest files or manifest directories")
      ->required();
  replay->add_option("--out", replay_out, "Artifact directory (default: the recorded one)");

  // The CLI11 vector overload expects arguments in reverse order.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (*replay) return RunReplay(replay_inputs, replay_out);

  CLI::App* active = app.get_subcommands().front();
  ApplyConfigFile(*active);
  const Context ctx{Layout{fs::path(out)}, active};
  fs::create_directories(ctx.layout.out);
  if (active == prepare) return RunPrepare(ctx, prep);
  if (active == embed) return RunEmbed(ctx, emb);
  if (active == train) return RunTrain(ctx, train_args, train_flags);
  if (active == eval) return RunEval(ctx, eval_args, eval_opts);
  if (active == cv) return RunCv(ctx, cv_args, cv_flags, folds, cv_seed);
  if (active == compare) return RunCompare(ctx, cmp_args, cmp_flags, cmp);
  return RunGradcheck(ctx, gc);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Dispatch(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}
