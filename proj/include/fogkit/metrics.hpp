#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fogkit {

// FOG (+1) is the positive class.
struct ConfusionCounts {
  std::uint64_t tp{0};
  std::uint64_t fn{0};
  std::uint64_t tn{0};
  std::uint64_t fp{0};

  std::uint64_t total() const { return tp + fn + tn + fp; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Throws LengthError on empty or unequal inputs, LabelError on values other
// than +1/-1.
ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);

enum class Metric { Accuracy = 0, Sensitivity, Specificity, Precision, F1, Auc };
inline constexpr std::size_t kMetricCount = 6;
// Column titles in report order.
inline constexpr std::array<const char*, kMetricCount> kMetricTitles = {
    "Accuracy", "Sensitivity", "Specificity", "Precision", "F1 Value", "AUC"};
inline constexpr std::array<const char*, kMetricCount> kMetricKeys = {
    "accuracy", "sensitivity", "specificity", "precision", "f1", "auc"};

// An undefined ratio is reported as 0 with the metric's bit set in
// `degenerate` (bit index = Metric value).
struct MetricSet {
  std::array<double, kMetricCount> values{};
  unsigned degenerate{0};

  double operator[](Metric m) const { return values[static_cast<std::size_t>(m)]; }
  double& operator[](Metric m) { return values[static_cast<std::size_t>(m)]; }
  bool is_degenerate(Metric m) const { return (degenerate >> static_cast<unsigned>(m)) & 1U; }
  bool operator==(const MetricSet&) const = default;
};

// Everything except AUC, which stays 0 and unflagged.
MetricSet metrics(const ConfusionCounts& c);

// Mann-Whitney statistic with rank-averaged ties, equal to the trapezoidal
// ROC area. Throws ClassError unless both classes occur.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

struct RocPoint {
  double fpr{0.0};
  double tpr{0.0};
  double threshold{0.0};
};

// One point per distinct score (descending) plus the (0, 0) origin, whose
// threshold is +inf.
std::vector<RocPoint> roc_curve(std::span<const int> y_true, std::span<const double> scores);

}  // namespace fogkit
