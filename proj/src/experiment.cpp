#include "fogkit/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fogkit/recording_io.hpp"
#include "json.hpp"

namespace fogkit {

namespace {

Matrix rows_of(const FeatureTable& t, std::span<const std::size_t> idx) {
  Matrix out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(t.rows[i]);
  return out;
}

std::vector<int> labels_of(const FeatureTable& t, std::span<const std::size_t> idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(t.label[i]);
  return out;
}

void summarize(ExperimentReport& rep) {
  const double n = static_cast<double>(rep.runs.size());
  rep.mean.fill(0.0);
  rep.sd.fill(0.0);
  rep.degenerate = 0;
  if (rep.runs.empty()) return;
  for (const auto& run : rep.runs) {
    for (std::size_t k = 0; k < kMetricCount; ++k) rep.mean[k] += run.metrics.values[k];
    rep.degenerate |= run.metrics.degenerate;
  }
  for (double& m : rep.mean) m /= n;
  if (rep.runs.size() < 2) return;
  for (const auto& run : rep.runs) {
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      const double d = run.metrics.values[k] - rep.mean[k];
      rep.sd[k] += d * d;
    }
  }
  for (double& s : rep.sd) s = std::sqrt(s / (n - 1.0));
}

ExperimentReport skipped_report(const std::string& subject, FeatureMask mask, const ExperimentConfig& cfg,
                                std::string reason) {
  ExperimentReport rep;
  rep.subject = subject;
  rep.mask = mask;
  rep.skipped = true;
  rep.skip_reason = std::move(reason);
  rep.config = cfg;
  return rep;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  return out;
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  nlohmann::json masks = nlohmann::json::array();
  for (auto m : cfg.masks) masks.push_back(to_string(m));
  return {{"masks", masks},
          {"window", {{"window_s", cfg.window.window_s}, {"step_s", cfg.window.step_s},
                      {"threshold", cfg.window.threshold}}},
          {"grid", {{"C_values", cfg.grid.C_values}, {"gamma_values", cfg.grid.gamma_values},
                    {"folds", cfg.grid.folds}}},
          {"split", {{"test_fraction", cfg.split.test_fraction}, {"stratified", cfg.split.stratified}}},
          {"svm", {{"tolerance", cfg.svm.tolerance}, {"max_iterations", cfg.svm.max_iterations},
                   {"positive_weight", cfg.svm.positive_weight}, {"negative_weight", cfg.svm.negative_weight}}},
          {"replications", cfg.replications},
          {"seed", cfg.seed}};
}

}  // namespace

void check_experiment_config(const ExperimentConfig& cfg) {
  if (cfg.replications < 1) throw SpecError("replications must be >= 1");
  if (cfg.masks.empty()) throw SpecError("at least one feature mask is required");
  for (auto m : cfg.masks)
    if (m == FeatureMask::None) throw SpecError("feature mask is empty");
  check_grid_spec(cfg.grid);
  if (!(cfg.split.test_fraction > 0.0 && cfg.split.test_fraction < 1.0)) {
    throw SpecError("test fraction must lie in (0, 1)");
  }
}

ExperimentReport run_replications(const FeatureTable& table, FeatureMask mask, const ExperimentConfig& cfg,
                                  std::string subject, Diagnostics* diag) {
  check_experiment_config(cfg);
  const FeatureTable sel = table.select(mask);
  ExperimentReport rep;
  rep.subject = std::move(subject);
  rep.mask = mask;
  rep.config = cfg;

  SvmOptions final_opts = cfg.svm;
  final_opts.standardize = false;
  for (int r = 0; r < cfg.replications; ++r) {
    RunResult run;
    run.replication = r;
    run.seed = cfg.seed + static_cast<std::uint64_t>(r);
    SplitSpec split = cfg.split;
    split.seed = run.seed;
    const Split s = train_test_split(sel.label, split);
    const Matrix Xtr = rows_of(sel, s.train);
    const std::vector<int> ytr = labels_of(sel, s.train);
    const Matrix Xte = rows_of(sel, s.test);
    run.y_test = labels_of(sel, s.test);
    run.n_train = Xtr.size();
    run.n_test = Xte.size();

    const Standardizer st = standardize_fit(Xtr, diag);
    const Matrix Ztr = standardize_apply(st, Xtr);
    const GridSearchResult gs = grid_search_cv(Ztr, ytr, cfg.grid, run.seed, cfg.svm, cfg.jobs, diag);
    run.C = gs.best_C;
    run.gamma = gs.best_gamma;
    run.cv_accuracy = gs.best_accuracy;

    SvmModel model;
    try {
      model = svm_train(Ztr, ytr, run.C, run.gamma, final_opts, nullptr, diag);
    } catch (const ConvergenceError& e) {
      warn(diag, std::string(e.what()) + "; using the last iterate");
      model = e.model();
    }
    model.standardizer = st;
    run.scores = svm_decision(model, Xte);

    std::vector<int> pred(run.scores.size());
    for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = run.scores[i] >= 0.0 ? 1 : -1;
    run.counts = confusion(run.y_test, pred);
    run.metrics = metrics(run.counts);
    if (run.counts.tp + run.counts.fn > 0 && run.counts.tn + run.counts.fp > 0) {
      run.metrics[Metric::Auc] = roc_auc(run.y_test, run.scores);
    } else {
      run.metrics.degenerate |= 1U << static_cast<unsigned>(Metric::Auc);
    }
    rep.runs.push_back(std::move(run));
  }
  summarize(rep);
  return rep;
}

std::vector<ExperimentReport> run_subject_independent(const FeatureTable& table, const ExperimentConfig& cfg,
                                                      Diagnostics* diag) {
  check_experiment_config(cfg);
  std::vector<ExperimentReport> out;
  for (auto mask : cfg.masks) out.push_back(run_replications(table, mask, cfg, "ALL", diag));
  return out;
}

std::vector<ExperimentReport> run_subject_dependent(const FeatureTable& table, const ExperimentConfig& cfg,
                                                    Diagnostics* diag) {
  check_experiment_config(cfg);
  std::vector<std::string> subjects;
  for (const auto& s : table.subject)
    if (std::find(subjects.begin(), subjects.end(), s) == subjects.end()) subjects.push_back(s);

  std::vector<ExperimentReport> out;
  for (const auto& subj : subjects) {
    std::vector<std::size_t> idx;
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
      if (table.subject[i] != subj) continue;
      idx.push_back(i);
      (table.label[i] > 0 ? pos : neg)++;
    }
    const FeatureTable sub = table.subset(idx);
    for (auto mask : cfg.masks) {
      if (pos < 2 || neg < 2) {
        out.push_back(skipped_report(subj, mask, cfg,
                                     "needs 2 segments per class, has " + std::to_string(pos) + " FOG and " +
                                         std::to_string(neg) + " non-FOG"));
        continue;
      }
      try {
        out.push_back(run_replications(sub, mask, cfg, subj, diag));
      } catch (const Error& e) {
        warn(diag, "subject " + subj + " (" + to_string(mask) + ") skipped: " + e.what());
        out.push_back(skipped_report(subj, mask, cfg, e.what()));
      }
    }
  }
  return out;
}

void write_runs_csv(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "subject,mask,replication,seed,C,gamma,cv_accuracy,n_train,n_test,tp,fn,tn,fp";
  for (const char* k : kMetricKeys) out << ',' << k;
  out << ",degenerate\n";
  for (const auto& rep : reports) {
    for (const auto& run : rep.runs) {
      out << rep.subject << ',' << to_string(rep.mask) << ',' << run.replication << ',' << run.seed << ','
          << format_double(run.C) << ',' << format_double(run.gamma) << ',' << format_double(run.cv_accuracy) << ','
          << run.n_train << ',' << run.n_test << ',' << run.counts.tp << ',' << run.counts.fn << ',' << run.counts.tn
          << ',' << run.counts.fp;
      for (double v : run.metrics.values) out << ',' << format_double(v);
      out << ',' << run.metrics.degenerate << '\n';
    }
  }
}

std::string format_summary(const std::vector<ExperimentReport>& reports) {
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-10s %-8s", "Subject", "Mask");
  os << buf;
  for (const char* t : kMetricTitles) {
    std::snprintf(buf, sizeof buf, " %-16s", t);
    os << buf;
  }
  os << '\n';
  for (const auto& rep : reports) {
    std::snprintf(buf, sizeof buf, "%-10s %-8s", rep.subject.c_str(), to_string(rep.mask).c_str());
    os << buf;
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      if (rep.skipped) {
        std::snprintf(buf, sizeof buf, " %-16s", "/");
      } else {
        std::snprintf(buf, sizeof buf, " %.4f±%.4f%s", rep.mean[k], rep.sd[k],
                      (rep.degenerate >> k) & 1U ? "*" : "  ");
      }
      os << buf;
    }
    if (rep.skipped) os << "  (" << rep.skip_reason << ')';
    os << '\n';
  }
  bool any = false;
  for (const auto& rep : reports) any = any || (!rep.skipped && rep.degenerate != 0);
  if (any) os << "* at least one run had an undefined ratio, counted as 0\n";
  return os.str();
}

void write_summary(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << format_summary(reports);
}

void write_roc_csv(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file) {
  auto out = open_out(file);
  out << "subject,mask,replication,fpr,tpr,threshold\n";
  for (const auto& rep : reports) {
    for (const auto& run : rep.runs) {
      if ((run.metrics.degenerate >> static_cast<unsigned>(Metric::Auc)) & 1U) continue;
      for (const auto& p : roc_curve(run.y_test, run.scores)) {
        out << rep.subject << ',' << to_string(rep.mask) << ',' << run.replication << ',' << format_double(p.fpr)
            << ',' << format_double(p.tpr) << ',' << (std::isinf(p.threshold) ? "inf" : format_double(p.threshold))
            << '\n';
      }
    }
  }
}

void write_report_json(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& rep : reports) {
    nlohmann::json r;
    r["subject"] = rep.subject;
    r["mask"] = to_string(rep.mask);
    r["skipped"] = rep.skipped;
    if (rep.skipped) r["skip_reason"] = rep.skip_reason;
    r["runs"] = rep.runs.size();
    for (std::size_t k = 0; k < kMetricCount; ++k) {
      r["metrics"][kMetricKeys[k]] = {{"mean", rep.mean[k]}, {"sd", rep.sd[k]},
                                      {"degenerate", static_cast<bool>((rep.degenerate >> k) & 1U)}};
    }
    r["config"] = config_json(rep.config);
    j.push_back(std::move(r));
  }
  auto out = open_out(file);
  out << j.dump(2) << '\n';
}

}  // namespace fogkit
