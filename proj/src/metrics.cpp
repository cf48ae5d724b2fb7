#include "fogkit/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "fogkit/errors.hpp"

namespace fogkit {

namespace {

void check_pair(std::size_t a, std::size_t b, const char* what) {
  if (a == 0) throw LengthError(std::string(what) + ": empty input");
  if (a != b) throw LengthError(std::string(what) + ": inputs differ in length");
}

void check_label(int v) {
  if (v != 1 && v != -1) throw LabelError("labels must be +1 or -1");
}

}  // namespace

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  check_pair(y_true.size(), y_pred.size(), "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    check_label(y_true[i]);
    check_label(y_pred[i]);
    if (y_true[i] > 0) (y_pred[i] > 0 ? c.tp : c.fn)++;
    else (y_pred[i] > 0 ? c.fp : c.tn)++;
  }
  return c;
}

MetricSet metrics(const ConfusionCounts& c) {
  MetricSet m;
  auto ratio = [&](std::uint64_t num, std::uint64_t den, Metric which) {
    if (den == 0) {
      m.degenerate |= 1U << static_cast<unsigned>(which);
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m[Metric::Accuracy] = ratio(c.tp + c.tn, c.total(), Metric::Accuracy);
  m[Metric::Sensitivity] = ratio(c.tp, c.tp + c.fn, Metric::Sensitivity);
  m[Metric::Specificity] = ratio(c.tn, c.tn + c.fp, Metric::Specificity);
  m[Metric::Precision] = ratio(c.tp, c.tp + c.fp, Metric::Precision);
  const double p = m[Metric::Precision], s = m[Metric::Sensitivity];
  if (p + s > 0.0) {
    m[Metric::F1] = 2.0 * p * s / (p + s);
  } else {
    m.degenerate |= 1U << static_cast<unsigned>(Metric::F1);
  }
  return m;
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  check_pair(y_true.size(), scores.size(), "roc_auc");
  const std::size_t n = y_true.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::uint64_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
    // Ranks i+1 .. j share their average.
    const double avg = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      check_label(y_true[idx[k]]);
      if (y_true[idx[k]] > 0) {
        pos_rank_sum += avg;
        ++n_pos;
      }
    }
    i = j;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ClassError("roc_auc needs both classes");
  const double np = static_cast<double>(n_pos);
  const double u = pos_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

std::vector<RocPoint> roc_curve(std::span<const int> y_true, std::span<const double> scores) {
  check_pair(y_true.size(), scores.size(), "roc_curve");
  const std::size_t n = y_true.size();
  std::uint64_t n_pos = 0;
  for (int v : y_true) {
    check_label(v);
    if (v > 0) ++n_pos;
  }
  const std::uint64_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw ClassError("roc_curve needs both classes");

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  std::vector<RocPoint> out{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::uint64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[idx[j]] == scores[idx[i]]) {
      (y_true[idx[j]] > 0 ? tp : fp)++;
      ++j;
    }
    out.push_back({static_cast<double>(fp) / static_cast<double>(n_neg),
                   static_cast<double>(tp) / static_cast<double>(n_pos), scores[idx[i]]});
    i = j;
  }
  return out;
}

}  // namespace fogkit
