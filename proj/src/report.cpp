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

#include "elreluwl/report.hpp"

#include <charconv>
#include <sstream>
#include <system_error>

#include "elreluwl/error.hpp"
#include "elreluwl/serialize.hpp"

namespace elreluwl {
namespace fs = std::filesystem;

std::string FormatNumber(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 12);
  if (ec != std::errc()) Fail(ErrorKind::kInvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

namespace {

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) : columns_(header.size()) {
    std::vector<std::string> h(header.begin(), header.end());
    Row(h);
  }

  void Row(const std::vector<std::string>& fields) {
    if (fields.size() != columns_) Fail(ErrorKind::kInvalidArgument, "CSV row width mismatch");
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << CsvField(fields[i]);
    }
    out_ << "\r\n";
  }

  std::string str() const { return out_.str(); }

 private:
  std::size_t columns_;
  std::ostringstream out_;
};

std::string Num(double v) { return FormatNumber(v); }
std::string Int(std::size_t v) { return std::to_string(v); }

std::string Fixed(double v, int digits) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("?");
}

std::string Percent(double v) { return Fixed(100.0 * v, 2) + "%"; }

struct Writers {
  CsvWriter metrics{"run_id", "preset", "dataset", "epoch", "train_loss", "train_acc", "val_acc", "ms"};
  CsvWriter summary{"run_id",         "preset",         "dataset",
                    "kind",           "n_evaluated",    "accuracy",
                    "accuracy_std",   "macro_accuracy", "acc_negative",
                    "acc_positive",   "mean_true_prob", "convergence_epoch",
                    "convergence_epoch_std", "best_val_acc", "ms"};
  std::ostringstream md;
};

void History(Writers& w, const std::string& run_id, const std::string& dataset,
             const TrainReport& r) {
  for (const EpochRecord& e : r.history) {
    w.metrics.Row({run_id, r.preset, dataset, Int(e.epoch), Num(e.train_loss),
                   Num(e.train_accuracy), Num(e.validation_accuracy), Num(e.ms)});
  }
}

// Blank for a class with no evaluated documents.
std::string ClassAccuracy(const EvalResult& e, int label) {
  return e.class_counts[label] == 0 ? std::string() : Num(e.per_class_accuracy[label]);
}

std::vector<std::string> EvalColumns(const EvalResult& e) {
  return {Int(e.n_evaluated), Num(e.accuracy), "", Num(e.macro_accuracy()),
          ClassAccuracy(e, kNegative), ClassAccuracy(e, kPositive),
          Num(e.mean_true_probability)};
}

void SummaryRow(Writers& w, std::vector<std::string> head, std::vector<std::string> eval,
                std::vector<std::string> tail) {
  head.insert(head.end(), eval.begin(), eval.end());
  head.insert(head.end(), tail.begin(), tail.end());
  w.summary.Row(head);
}

std::vector<std::string> TrainTail(const TrainReport& r) {
  return {Int(r.convergence_epoch), "", Num(r.best_validation_accuracy), Num(r.total_ms)};
}

void Emit(Writers& w, const std::string& id, const TrainRun& run) {
  const TrainReport& r = run.report;
  History(w, id, run.dataset, r);
  const double conv_val = r.convergence_epoch > 0
                              ? r.history[r.convergence_epoch - 1].validation_accuracy
                              : 0.0;
  SummaryRow(w, {id, r.preset, run.dataset, "train"},
             {Int(r.validation_size), Num(conv_val), "", "", "", "", ""}, TrainTail(r));

  w.md << "## Training run `" << id << "` (" << r.preset << ", " << run.dataset << ")\n\n"
       << "Convergence epoch " << r.convergence_epoch << ", best validation accuracy "
       << Percent(r.best_validation_accuracy) << ", " << r.history.size() << " epochs run"
       << (r.stopped_early ? " (early stop)" : "") << ".\n\n"
       << "| Epoch | Train loss | Train accuracy | Validation accuracy | Time (ms) |\n"
       << "|---:|---:|---:|---:|---:|\n";
  for (const EpochRecord& e : r.history) {
    w.md << "| " << e.epoch << " | " << Fixed(e.train_loss, 4) << " | " << Percent(e.train_accuracy)
         << " | " << Percent(e.validation_accuracy) << " | " << Fixed(e.ms, 1) << " |\n";
  }
  w.md << "\n";
}

void Emit(Writers& w, const std::string& id, const CvRun& run) {
  const CvReport& cv = run.report;
  w.md << "## Cross-validation `" << id << "` (" << cv.preset << ", " << run.dataset << ", "
       << cv.k_folds << " folds, seed " << cv.seed << ")\n\n"
       << "| Fold | Test accuracy | Macro accuracy | Negative | Positive | Convergence epoch | Time (ms) |\n"
       << "|---:|---:|---:|---:|---:|---:|---:|\n";
  for (std::size_t f = 0; f < cv.folds.size(); ++f) {
    const FoldResult& fold = cv.folds[f];
    const std::string fid = id + "-fold" + std::to_string(f + 1);
    History(w, fid, run.dataset, fold.train);
    SummaryRow(w, {fid, cv.preset, run.dataset, "fold"}, EvalColumns(fold.test),
               TrainTail(fold.train));
    w.md << "| " << f + 1 << " | " << Percent(fold.test.accuracy) << " | "
         << Percent(fold.test.macro_accuracy()) << " | "
         << Percent(fold.test.per_class_accuracy[kNegative]) << " | "
         << Percent(fold.test.per_class_accuracy[kPositive]) << " | "
         << fold.train.convergence_epoch << " | " << Fixed(fold.train.total_ms, 1) << " |\n";
  }
  std::size_t n = 0;
  for (const FoldResult& f : cv.folds) n += f.test.n_evaluated;
  SummaryRow(w, {id + "-mean", cv.preset, run.dataset, "aggregate"},
             {Int(n), Num(cv.mean_accuracy), Num(cv.std_accuracy), Num(cv.mean_macro_accuracy),
              "", "", ""},
             {Num(cv.mean_convergence_epoch), Num(cv.std_convergence_epoch), "", ""});
  w.md << "| mean | " << Percent(cv.mean_accuracy) << " ± " << Percent(cv.std_accuracy) << " | "
       << Percent(cv.mean_macro_accuracy) << " | | | " << Fixed(cv.mean_convergence_epoch, 2)
       << " ± " << Fixed(cv.std_convergence_epoch, 2) << " | |\n\n";
}

void Emit(Writers& w, const std::string& id, const ComparisonRun& run) {
  const ComparisonReport& c = run.report;
  const auto minority = static_cast<std::size_t>(c.minority_class);
  w.md << "## Comparison `" << id << "` on " << run.dataset << ": " << c.baseline_name
       << " vs " << c.proposed_name << "\n\n"
       << "| Seed | " << c.baseline_name << " accuracy | " << c.baseline_name << " epochs | "
       << c.proposed_name << " accuracy | " << c.proposed_name << " epochs | "
       << c.baseline_name << " minority acc. | " << c.proposed_name << " minority acc. |\n"
       << "|---:|---:|---:|---:|---:|---:|---:|\n";
  std::vector<double> acc_b, acc_p, ep_b, ep_p;
  for (const PairedRun& p : c.runs) {
    for (const auto* side : {&p.baseline, &p.proposed}) {
      const std::string rid = id + "-seed" + std::to_string(p.seed) + "-" + side->train.preset +
                              (side == &p.baseline ? "-baseline" : "-proposed");
      History(w, rid, run.dataset, side->train);
      SummaryRow(w, {rid, side->train.preset, run.dataset, "compare"}, EvalColumns(side->test),
                 TrainTail(side->train));
    }
    acc_b.push_back(p.baseline.test.accuracy);
    acc_p.push_back(p.proposed.test.accuracy);
    ep_b.push_back(static_cast<double>(p.baseline.train.convergence_epoch));
    ep_p.push_back(static_cast<double>(p.proposed.train.convergence_epoch));
    w.md << "| " << p.seed << " | " << Percent(p.baseline.test.accuracy) << " | "
         << p.baseline.train.convergence_epoch << " | " << Percent(p.proposed.test.accuracy)
         << " | " << p.proposed.train.convergence_epoch << " | "
         << Percent(p.baseline.test.per_class_accuracy[minority]) << " | "
         << Percent(p.proposed.test.per_class_accuracy[minority]) << " |\n";
  }
  w.md << "| mean | " << Percent(Mean(acc_b)) << " | " << Fixed(Mean(ep_b), 2) << " | "
       << Percent(Mean(acc_p)) << " | " << Fixed(Mean(ep_p), 2) << " | | |\n\n"
       << "Out of " << c.runs.size() << " seeds, " << c.proposed_name << " had higher accuracy in "
       << c.accuracy_wins << " (" << c.accuracy_ties << " ties), converged in fewer epochs in "
       << c.convergence_wins << " (" << c.convergence_ties
       << " ties), and had higher minority-class accuracy in " << c.minority_accuracy_wins
       << " (" << c.minority_accuracy_ties << " ties).\n\n";
}

void Emit(Writers& w, const std::string& id, const EvalRun& run) {
  SummaryRow(w, {id, run.preset, run.dataset, "eval"}, EvalColumns(run.overall),
             {"", "", "", run.timing ? Num(run.timing->mean_ms) : ""});
  const EvalResult& o = run.overall;
  w.md << "## Evaluation `" << id << "` (" << run.preset << ", " << run.dataset << ")\n\n"
       << "Accuracy " << Percent(o.accuracy) << " over " << o.n_evaluated
       << " samples; macro-average of per-class accuracy " << Percent(o.macro_accuracy())
       << ". Confusion: TP " << o.confusion.tp << ", TN " << o.confusion.tn << ", FP "
       << o.confusion.fp << ", FN " << o.confusion.fn << ".\n\n";
  if (run.timing) {
    const TimingStats& t = *run.timing;
    w.md << "Per-sample inference time over " << t.measurements << " measurements: median "
         << Fixed(t.median_ms, 4) << " ms, mean " << Fixed(t.mean_ms, 4) << " ms, min "
         << Fixed(t.min_ms, 4) << " ms, max " << Fixed(t.max_ms, 4) << " ms.\n\n";
  }
  if (!run.strata.empty()) {
    w.md << "| Stratum | Review class | Samples | Accuracy | Mean true-class probability |\n"
         << "|---|---|---:|---:|---:|\n";
    for (const StratumResult& s : run.strata) {
      const std::string cls = s.label == kPositive ? "positive" : "negative";
      const std::string sid = id + "-" + cls.substr(0, 3) + "-s" + std::to_string(s.stratum + 1);
      SummaryRow(w, {sid, run.preset, run.dataset, "stratum"}, EvalColumns(s.result),
                 {"", "", "", ""});
      w.md << "| " << (s.label == kPositive ? 2 : 1) << "." << s.stratum + 1 << " | " << cls
           << " | " << s.result.n_evaluated << " | " << Percent(s.result.accuracy) << " | "
           << Percent(s.result.mean_true_probability) << " |\n";
    }
    w.md << "\n";
  }
}

}  // namespace

std::vector<fs::path> EmitReport(std::span<const ReportItem> items, const fs::path& out_dir) {
  if (items.empty()) Fail(ErrorKind::kInvalidArgument, "no reports to emit");
  Writers w;
  w.md << "# Results\n\n";
  for (std::size_t i = 0; i < items.size(); ++i) {
    const std::string prefix = "r" + std::to_string(i + 1);
    std::visit(
        [&](const auto& run) {
          using T = std::decay_t<decltype(run)>;
          std::string id;
          if constexpr (std::is_same_v<T, TrainRun>) id = prefix + "-train-" + run.report.preset;
          if constexpr (std::is_same_v<T, CvRun>) id = prefix + "-cv-" + run.report.preset;
          if constexpr (std::is_same_v<T, ComparisonRun>) id = prefix + "-compare";
          if constexpr (std::is_same_v<T, EvalRun>) id = prefix + "-eval-" + run.preset;
          Emit(w, id, run);
        },
        items[i]);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) Fail(ErrorKind::kIo, "cannot create '" + out_dir.string() + "': " + ec.message());
  const std::vector<fs::path> paths = {out_dir / "metrics.csv", out_dir / "summary.csv",
                                       out_dir / "report.md"};
  WriteTextFile(paths[0], w.metrics.str());
  WriteTextFile(paths[1], w.summary.str());
  WriteTextFile(paths[2], w.md.str());
  return paths;
}

}  // namespace elreluwl
