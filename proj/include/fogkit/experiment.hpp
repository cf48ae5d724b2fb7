#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fogkit/features.hpp"
#include "fogkit/metrics.hpp"
#include "fogkit/model_selection.hpp"
#include "fogkit/segment.hpp"

namespace fogkit {

struct ExperimentConfig {
  std::vector<FeatureMask> masks{FeatureMask::EEG, FeatureMask::EMG, FeatureMask::ACC, FeatureMask::All};
  SplitSpec split;  // split.seed is replaced per replication
  GridSpec grid{GridSpec::defaults()};
  SvmOptions svm;
  int replications{20};
  std::uint64_t seed{0};
  int jobs{1};
  WindowSpec window;  // echoed into reports only
};

// Throws SpecError on replications < 1, an empty mask list or a bad grid.
void check_experiment_config(const ExperimentConfig& cfg);

// One split / grid search / train / test cycle.
struct RunResult {
  int replication{0};
  std::uint64_t seed{0};
  double C{0.0};
  double gamma{0.0};
  double cv_accuracy{0.0};
  std::size_t n_train{0};
  std::size_t n_test{0};
  ConfusionCounts counts;
  MetricSet metrics;
  std::vector<int> y_test;
  std::vector<double> scores;
};

struct ExperimentReport {
  std::string subject;  // "ALL" for pooled runs
  FeatureMask mask{FeatureMask::All};
  bool skipped{false};
  std::string skip_reason;
  std::vector<RunResult> runs;
  std::array<double, kMetricCount> mean{};
  std::array<double, kMetricCount> sd{};  // sample SD, 0 for a single run
  unsigned degenerate{0};                // union over runs
  ExperimentConfig config;
};

// Replication r uses seed + r for the split and the fold assignment.
ExperimentReport run_replications(const FeatureTable& table, FeatureMask mask, const ExperimentConfig& cfg,
                                  std::string subject, Diagnostics* diag = nullptr);

// Pooled over every row; one report per mask in cfg.masks.
std::vector<ExperimentReport> run_subject_independent(const FeatureTable& table, const ExperimentConfig& cfg,
                                                      Diagnostics* diag = nullptr);

// One report per subject (first-appearance order) and mask. Subjects with
// fewer than 2 segments of either class, or whose runs fail on input
// errors, are returned as skipped.
std::vector<ExperimentReport> run_subject_dependent(const FeatureTable& table, const ExperimentConfig& cfg,
                                                    Diagnostics* diag = nullptr);

// subject,mask,replication,seed,C,gamma,cv_accuracy,n_train,n_test,tp,fn,tn,fp,<metrics>,degenerate
void write_runs_csv(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file);
// Fixed-width table, one row per report, "mean±sd" cells, "/" for skipped rows.
std::string format_summary(const std::vector<ExperimentReport>& reports);
void write_summary(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file);
// subject,mask,replication,fpr,tpr,threshold
void write_roc_csv(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file);
// Summary statistics plus the config echo, as JSON.
void write_report_json(const std::vector<ExperimentReport>& reports, const std::filesystem::path& file);

}  // namespace fogkit
