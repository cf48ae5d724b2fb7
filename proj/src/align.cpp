#include "fogkit/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fogkit/errors.hpp"
#include "fogkit/filter.hpp"

namespace fogkit {

namespace {

constexpr double kTimeSlackMs = 1e-6;

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  const std::size_t n = knots_.size();
  if (n != values_.size()) throw LengthError("spline knots and values differ in length");
  if (n < 4) throw InsufficientData("cubic interpolation needs at least 4 samples, got " + std::to_string(n));
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = knots_[i + 1] - knots_[i];
    if (!(h[i] > 0.0)) throw IntegrityError("spline knots must be strictly increasing");
  }

  // Second derivatives M_1..M_{n-2}; M_0 and M_{n-1} follow from the
  // not-a-knot conditions (third derivative continuous at t_1 and t_{n-2}).
  const std::size_t m = n - 2;
  std::vector<double> lower(m), diag(m), upper(m), rhs(m);
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = r + 1;
    lower[r] = h[i - 1];
    diag[r] = 2.0 * (h[i - 1] + h[i]);
    upper[r] = h[i];
    rhs[r] = 6.0 * ((values_[i + 1] - values_[i]) / h[i] - (values_[i] - values_[i - 1]) / h[i - 1]);
  }
  diag[0] += h[0] * (h[0] + h[1]) / h[1];
  upper[0] -= h[0] * h[0] / h[1];
  diag[m - 1] += h[n - 2] * (h[n - 3] + h[n - 2]) / h[n - 3];
  lower[m - 1] -= h[n - 2] * h[n - 2] / h[n - 3];

  for (std::size_t r = 1; r < m; ++r) {
    const double w = lower[r] / diag[r - 1];
    diag[r] -= w * upper[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  std::vector<double> M(n);
  M[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t r = m - 1; r-- > 0;) M[r + 1] = (rhs[r] - upper[r] * M[r + 2]) / diag[r];
  M[0] = ((h[0] + h[1]) * M[1] - h[0] * M[2]) / h[1];
  M[n - 1] = ((h[n - 3] + h[n - 2]) * M[n - 2] - h[n - 2] * M[n - 3]) / h[n - 3];

  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    b_[i] = (values_[i + 1] - values_[i]) / h[i] - h[i] * (2.0 * M[i] + M[i + 1]) / 6.0;
    c_[i] = M[i] / 2.0;
    d_[i] = (M[i + 1] - M[i]) / (6.0 * h[i]);
  }
}

double CubicSpline::operator()(double t) const {
  if (t == knots_.back()) return values_.back();
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  i = std::min(i, knots_.size() - 2);
  const double dt = t - knots_[i];
  return values_[i] + dt * (b_[i] + dt * (c_[i] + dt * d_[i]));
}

TimeSeries cubic_resample(const TimeSeries& ts, std::span<const double> target_times_ms, bool edge_hold) {
  if (ts.size() < 4) {
    throw InsufficientData("channel " + ts.channel.name + ": cubic interpolation needs at least 4 samples");
  }
  std::vector<double> knots(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) knots[k] = ts.time_ms(k);
  const CubicSpline spline(std::move(knots), ts.samples);

  TimeSeries out;
  out.channel = ts.channel;
  out.samples.reserve(target_times_ms.size());
  for (double t : target_times_ms) {
    if (t < spline.front() || t > spline.back()) {
      const bool below = t < spline.front();
      const double edge = below ? spline.front() : spline.back();
      if (std::abs(t - edge) <= kTimeSlackMs) {
        t = edge;
      } else if (edge_hold) {
        out.samples.push_back(below ? ts.samples.front() : ts.samples.back());
        continue;
      } else {
        throw RangeError("channel " + ts.channel.name + ": target time " + std::to_string(t) +
                         " ms outside source span [" + std::to_string(spline.front()) + ", " +
                         std::to_string(spline.back()) + "]");
      }
    }
    out.samples.push_back(spline(t));
  }
  if (target_times_ms.empty()) {
    out.t0_ms = ts.t0_ms;
    out.rate_hz = ts.rate_hz;
  } else {
    out.t0_ms = std::llround(target_times_ms.front());
    const double span = target_times_ms.back() - target_times_ms.front();
    out.rate_hz = target_times_ms.size() > 1 && span > 0.0
                      ? 1000.0 * static_cast<double>(target_times_ms.size() - 1) / span
                      : ts.rate_hz;
  }
  return out;
}

TimeSeries downsample_1000_to_500(const TimeSeries& ts) {
  if (std::abs(ts.rate_hz - 1000.0) > 1.0) {
    throw RateError("channel " + ts.channel.name + ": expected 1000 Hz input, got " +
                    std::to_string(ts.rate_hz) + " Hz");
  }
  const SosFilter aa = design_butterworth(FilterSpec::lowpass(200.0, 8), ts.rate_hz);
  const std::vector<double> filtered = sos_filtfilt(aa, ts.samples);
  TimeSeries out;
  out.channel = ts.channel;
  out.t0_ms = ts.t0_ms;
  out.rate_hz = 500.0;
  out.gap_count = ts.gap_count;
  out.samples.reserve(filtered.size() / 2 + 1);
  for (std::size_t k = 0; k < filtered.size(); k += 2) out.samples.push_back(filtered[k]);
  return out;
}

Recording align_recording(const Recording& r, const AlignmentPlan& plan) {
  if (!(plan.target_rate_hz > 0.0)) throw SpecError("target rate must be positive");
  const auto masters = r.channels_of(plan.master);
  if (masters.empty()) {
    throw AlignmentError("master subsystem " + std::string(to_string(plan.master)) + " not in recording");
  }
  auto offset_of = [&](Modality m) {
    auto it = plan.offset_override_ms.find(m);
    return it != plan.offset_override_ms.end() ? it->second : r.offset_ms(m);
  };

  // Bring 1000 Hz subsystems down to 500 Hz before interpolation.
  std::vector<TimeSeries> staged;
  staged.reserve(r.series.size());
  for (const auto& ts : r.series) {
    if (ts.size() < 4) {
      throw InsufficientData("channel " + ts.channel.name + " has fewer than 4 samples");
    }
    const bool decimate = plan.target_rate_hz == 500.0 && std::abs(ts.rate_hz - 1000.0) <= 1.0;
    staged.push_back(decimate ? downsample_1000_to_500(ts) : ts);
  }

  double overlap_start = -std::numeric_limits<double>::infinity();
  double overlap_end = std::numeric_limits<double>::infinity();
  for (const auto& ts : staged) {
    const double off = static_cast<double>(offset_of(ts.channel.modality));
    overlap_start = std::max(overlap_start, ts.time_ms(0) + off);
    overlap_end = std::min(overlap_end, ts.time_ms(ts.size() - 1) + off);
  }
  if (!(overlap_start <= overlap_end)) {
    throw AlignmentError("subsystem time ranges do not overlap");
  }

  const TimeSeries& master = *masters.front();
  const double master_off = static_cast<double>(offset_of(plan.master));
  const double master_period = master.period_ms();
  const double k0 =
      std::max(0.0, std::ceil((overlap_start - (master.time_ms(0) + master_off)) / master_period - 1e-9));
  const double first = master.time_ms(static_cast<std::size_t>(k0)) + master_off;

  // Grid expressed as (t0, rate) so downstream time_ms() reproduces it.
  TimeSeries grid_ref;
  grid_ref.t0_ms = std::llround(first);
  grid_ref.rate_hz = plan.target_rate_hz;
  std::vector<double> grid;
  for (std::size_t j = 0;; ++j) {
    const double t = grid_ref.time_ms(j) + (first - static_cast<double>(grid_ref.t0_ms));
    if (t > overlap_end + kTimeSlackMs) break;
    grid.push_back(t);
  }
  if (grid.size() < 1) throw AlignmentError("overlap interval contains no master sample");

  Recording out;
  out.subject_id = r.subject_id;
  out.task_id = r.task_id;
  out.label_track = r.label_track;
  out.ica_cleaned = r.ica_cleaned;
  out.preprocessed = r.preprocessed;
  out.aligned = true;
  for (const auto& ts : staged) out.world_clock_offset_ms[ts.channel.modality] = 0;

  std::vector<double> local(grid.size());
  for (const auto& ts : staged) {
    const double off = static_cast<double>(offset_of(ts.channel.modality));
    for (std::size_t j = 0; j < grid.size(); ++j) local[j] = grid[j] - off;
    TimeSeries res = cubic_resample(ts, local, plan.edge_hold);
    res.t0_ms = grid_ref.t0_ms;
    res.rate_hz = plan.target_rate_hz;
    res.gap_count = ts.gap_count;
    out.series.push_back(std::move(res));
  }
  if (out.label_track) out.labels = rasterize_labels(out, *out.label_track);
  return out;
}

double detect_task_start(const TimeSeries& acc, const TaskStartOptions& opt) {
  const std::size_t n = acc.size();
  if (n < 2) throw NotFound("series too short to detect a task start");
  const auto window = std::max<std::size_t>(2, static_cast<std::size_t>(std::llround(opt.window_s * acc.rate_hz)));
  const std::size_t baseline = std::min(n, std::max<std::size_t>(
                                                2, static_cast<std::size_t>(std::llround(opt.baseline_s * acc.rate_hz))));
  const double center = median({acc.samples.begin(), acc.samples.begin() + static_cast<std::ptrdiff_t>(baseline)});

  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = acc.samples[k] - center;
    s1[k + 1] = s1[k] + v;
    s2[k + 1] = s2[k] + v * v;
  }
  auto sd = [&](std::size_t lo, std::size_t hi_inclusive) {
    const double cnt = static_cast<double>(hi_inclusive - lo + 1);
    const double mean = (s1[hi_inclusive + 1] - s1[lo]) / cnt;
    const double var = (s2[hi_inclusive + 1] - s2[lo]) / cnt - mean * mean;
    return std::sqrt(std::max(0.0, var));
  };

  std::vector<double> base_sds;
  if (baseline >= window) {
    for (std::size_t k = window - 1; k < baseline; ++k) base_sds.push_back(sd(k + 1 - window, k));
  } else {
    base_sds.push_back(sd(0, baseline - 1));
  }
  const double threshold = opt.threshold_scale * median(std::move(base_sds));

  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t lo = k + 1 >= window ? k + 1 - window : 0;
    if (sd(lo, k) > threshold) {
      for (std::size_t i = lo; i <= k; ++i) {
        if (std::abs(acc.samples[i] - center) > threshold) return acc.time_ms(i);
      }
      return acc.time_ms(k);
    }
  }
  throw NotFound("channel " + acc.channel.name + ": no window exceeds the task-start threshold");
}

TimeSeries acc_magnitude(const TimeSeries& x, const TimeSeries& y, const TimeSeries& z) {
  if (x.size() != y.size() || x.size() != z.size() || x.rate_hz != y.rate_hz || x.rate_hz != z.rate_hz ||
      x.t0_ms != y.t0_ms || x.t0_ms != z.t0_ms) {
    throw ChannelError("ACC axes must share rate, start time and length");
  }
  TimeSeries out = x;
  out.channel.name = x.channel.name + "_mag";
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.samples[k] = std::sqrt(x.samples[k] * x.samples[k] + y.samples[k] * y.samples[k] +
                               z.samples[k] * z.samples[k]);
  }
  return out;
}

std::vector<int> rasterize_labels(const Recording& aligned, const LabelTrack& track) {
  if (aligned.series.empty()) return {};
  const TimeSeries& ref = aligned.series.front();
  std::vector<int> labels(ref.size(), -1);
  std::size_t iv = 0;
  for (std::size_t k = 0; k < ref.size(); ++k) {
    const double t = ref.time_ms(k);
    while (iv < track.intervals.size() && static_cast<double>(track.intervals[iv].end_ms) <= t) ++iv;
    if (iv < track.intervals.size() && static_cast<double>(track.intervals[iv].start_ms) <= t) labels[k] = 1;
  }
  return labels;
}

}  // namespace fogkit
