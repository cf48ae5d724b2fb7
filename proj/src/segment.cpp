#include "fogkit/segment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "fogkit/errors.hpp"
#include "fogkit/recording_io.hpp"

namespace fogkit {

std::size_t seconds_to_samples(double seconds, double rate_hz) {
  const double x = seconds * rate_hz;
  // Products like 0.3 * 500 land a hair off the integer; snap before rounding.
  const double snapped = std::abs(x - std::round(x)) < 1e-9 ? std::round(x) : x;
  return static_cast<std::size_t>(std::floor(snapped + 0.5));
}

void check_window_spec(const WindowSpec& spec, double rate_hz) {
  if (!(rate_hz > 0.0)) throw SpecError("sample rate must be positive");
  if (!(spec.step_s > 0.0) || !(spec.step_s <= spec.window_s)) {
    throw SpecError("window spec needs 0 < step <= window");
  }
  if (!(spec.threshold > 0.0) || !(spec.threshold <= 1.0)) throw SpecError("threshold must lie in (0, 1]");
  if (seconds_to_samples(spec.step_s, rate_hz) == 0) throw SpecError("step is shorter than one sample");
}

std::vector<IndexRange> window_indices(std::size_t n_samples, const WindowSpec& spec, double rate_hz) {
  check_window_spec(spec, rate_hz);
  const std::size_t w = seconds_to_samples(spec.window_s, rate_hz);
  const std::size_t s = seconds_to_samples(spec.step_s, rate_hz);
  std::vector<IndexRange> out;
  if (w == 0 || n_samples < w) return out;
  const std::size_t count = (n_samples - w) / s + 1;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back({i * s, i * s + w});
  return out;
}

double pfg(std::span<const int> labels) {
  if (labels.empty()) return 0.0;
  const auto fog = std::count(labels.begin(), labels.end(), 1);
  return static_cast<double>(fog) / static_cast<double>(labels.size());
}

int segment_label(double pfg_value, double threshold) { return pfg_value >= threshold ? 1 : -1; }

std::vector<ChannelView> Segment::of(Modality m) const {
  std::vector<ChannelView> out;
  for (const auto& cv : channels) {
    if (cv.channel->modality == m) out.push_back(cv);
  }
  return out;
}

std::vector<Segment> segment_recording(const Recording& r, const WindowSpec& spec) {
  if (!r.labels) {
    throw LabelError("recording " + r.subject_id + "/" + r.task_id + " has no rasterized labels");
  }
  if (r.series.empty()) return {};
  const std::size_t n = r.aligned_length();
  for (const auto& ts : r.series) {
    if (ts.size() != n) throw AlignmentError("segmentation needs an aligned recording");
  }
  if (r.labels->size() != n) throw LabelError("label count differs from aligned sample count");

  const double rate = r.series.front().rate_hz;
  std::vector<Segment> out;
  const std::span<const int> labels(*r.labels);
  for (const auto& range : window_indices(n, spec, rate)) {
    Segment seg;
    seg.subject_id = r.subject_id;
    seg.task_id = r.task_id;
    seg.start_index = range.start;
    seg.length = range.end - range.start;
    seg.pfg = pfg(labels.subspan(range.start, seg.length));
    seg.label = segment_label(seg.pfg, spec.threshold);
    for (const auto& ts : r.series) {
      if (!ts.channel.roles.feature_eligible()) continue;
      seg.channels.push_back({&ts.channel, std::span<const double>(ts.samples).subspan(range.start, seg.length)});
    }
    out.push_back(std::move(seg));
  }
  return out;
}

void write_segment_manifest(std::span<const Segment> segments, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FormatError("cannot write " + file.string());
  out << "subject,task,start_index,pfg,label\n";
  for (const auto& s : segments) {
    out << s.subject_id << ',' << s.task_id << ',' << s.start_index << ',' << format_double(s.pfg) << ','
        << s.label << '\n';
  }
}

}  // namespace fogkit
