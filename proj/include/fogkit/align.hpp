#pragma once

#include <span>
#include <vector>

#include "fogkit/types.hpp"

namespace fogkit {

// Interpolating cubic spline with not-a-knot end conditions. Reproduces any
// cubic polynomial exactly and passes through every knot.
class CubicSpline {
 public:
  // Knots must be strictly increasing; at least 4 are required.
  CubicSpline(std::vector<double> knots, std::vector<double> values);

  double operator()(double t) const;
  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> b_, c_, d_;
};

// Evaluates the spline through ts at target times (ms, on ts's clock). With
// edge_hold, targets outside the source span take the nearest end sample;
// otherwise they raise RangeError. The result starts at round(targets[0])
// with rate inferred from the target spacing.
TimeSeries cubic_resample(const TimeSeries& ts, std::span<const double> target_times_ms,
                          bool edge_hold = false);

// Anti-alias low-pass (Butterworth, 8th order, 200 Hz, forward-backward)
// followed by keeping every second sample.
TimeSeries downsample_1000_to_500(const TimeSeries& ts);

struct AlignmentPlan {
  Modality master{Modality::ACC};
  double target_rate_hz{500.0};
  bool edge_hold{false};
  // Offsets that override the recording's own world_clock_offset_ms.
  std::map<Modality, std::int64_t> offset_override_ms;
};

// Resamples every channel onto the master subsystem's grid (world clock),
// restricted to the interval covered by all subsystems. Labels are
// rasterized when the recording carries a label track.
Recording align_recording(const Recording& r, const AlignmentPlan& plan = {});

struct TaskStartOptions {
  double window_s{1.0};
  double baseline_s{5.0};
  double threshold_scale{6.0};
};

// Earliest onset of the stand-up/sit-down maneuver in an ACC magnitude
// series; returned in ms on the series' clock. Throws NotFound.
double detect_task_start(const TimeSeries& acc, const TaskStartOptions& opt = {});

// Euclidean norm of three equally sampled axes.
TimeSeries acc_magnitude(const TimeSeries& x, const TimeSeries& y, const TimeSeries& z);

// +1 where the sample's world time lies in some [start, end), else -1.
std::vector<int> rasterize_labels(const Recording& aligned, const LabelTrack& track);

}  // namespace fogkit
