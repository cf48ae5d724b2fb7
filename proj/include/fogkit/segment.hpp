#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fogkit/types.hpp"

namespace fogkit {

struct WindowSpec {
  double window_s{3.0};
  double step_s{0.3};
  double threshold{0.80};
};

struct IndexRange {
  std::size_t start{0};
  std::size_t end{0};  // exclusive

  bool operator==(const IndexRange&) const = default;
};

// round-half-up conversion of seconds to samples.
std::size_t seconds_to_samples(double seconds, double rate_hz);

// Throws SpecError unless 0 < step <= window and 0 < threshold <= 1.
void check_window_spec(const WindowSpec& spec, double rate_hz);

// floor((n - W) / S) + 1 windows of W samples, trailing partial windows
// dropped; empty when n < W.
std::vector<IndexRange> window_indices(std::size_t n_samples, const WindowSpec& spec, double rate_hz);

// Fraction of +1 entries.
double pfg(std::span<const int> labels);

// +1 iff pfg >= threshold.
int segment_label(double pfg_value, double threshold);

struct ChannelView {
  const ChannelDescriptor* channel{nullptr};
  std::span<const double> samples;
};

// One window over an aligned recording. Views borrow from the recording,
// which must outlive the segment.
struct Segment {
  std::string subject_id;
  std::string task_id;
  std::size_t start_index{0};
  std::size_t length{0};
  double pfg{0.0};
  int label{-1};
  std::vector<ChannelView> channels;

  std::vector<ChannelView> of(Modality m) const;
};

// Views cover every feature-eligible channel. Throws LabelError when the
// recording has no rasterized labels.
std::vector<Segment> segment_recording(const Recording& r, const WindowSpec& spec = {});

// subject,task,start_index,pfg,label
void write_segment_manifest(std::span<const Segment> segments, const std::filesystem::path& file);

}  // namespace fogkit
