#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fogkit {

enum class Modality { EEG, EMG, ACC, SC };

inline constexpr std::array<Modality, 4> kAllModalities = {Modality::EEG, Modality::EMG,
                                                           Modality::ACC, Modality::SC};

std::string_view to_string(Modality m);
// Lowercase file stem used by the on-disk layout ("eeg", "emg", "acc", "sc").
std::string_view file_stem(Modality m);
// Accepts either case; throws FormatError on anything else.
Modality parse_modality(std::string_view text);

struct RoleFlags {
  bool reference{false};
  bool eog{false};
  bool excluded{false};

  bool feature_eligible() const { return !reference && !eog && !excluded; }
  bool operator==(const RoleFlags&) const = default;
};

struct ChannelDescriptor {
  std::string name;
  Modality modality{Modality::EEG};
  double native_rate_hz{0.0};
  RoleFlags roles;

  bool operator==(const ChannelDescriptor&) const = default;
};

// One channel sampled uniformly at rate_hz, first sample at t0_ms on the
// owning subsystem's clock (or on the world clock once aligned).
struct TimeSeries {
  ChannelDescriptor channel;
  std::int64_t t0_ms{0};
  double rate_hz{0.0};
  std::vector<double> samples;
  // Timestamp discontinuities seen while loading; informational only.
  std::size_t gap_count{0};

  double period_ms() const { return 1000.0 / rate_hz; }
  // Every component computes sample times through this one expression so
  // that a grid rebuilt from (t0, rate) hits the same doubles bit for bit.
  double time_ms(std::size_t k) const {
    return static_cast<double>(t0_ms) + static_cast<double>(k) * period_ms();
  }
  std::size_t size() const { return samples.size(); }
  double duration_s() const { return static_cast<double>(samples.size()) / rate_hz; }

  bool operator==(const TimeSeries&) const = default;
};

struct Interval {
  std::int64_t start_ms{0};
  std::int64_t end_ms{0};

  std::int64_t length_ms() const { return end_ms - start_ms; }
  bool operator==(const Interval&) const = default;
};

// FOG intervals on the world clock, sorted and disjoint.
struct LabelTrack {
  std::vector<Interval> intervals;
  std::string annotator_id;

  std::int64_t total_ms() const;
  bool operator==(const LabelTrack&) const = default;
};

// Sorts, checks start < end and disjointness. Throws IntegrityError.
LabelTrack make_label_track(std::vector<Interval> intervals, std::string annotator_id = {});

// Union of two valid tracks; touching or overlapping intervals are fused so
// the result is again sorted and disjoint.
LabelTrack merge_label_tracks(const LabelTrack& a, const LabelTrack& b);

// Optional sink for non-fatal conditions (degenerate inputs, fallbacks).
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string msg) { warnings.push_back(std::move(msg)); }
  bool empty() const { return warnings.empty(); }
};

inline void warn(Diagnostics* diag, std::string msg) {
  if (diag) diag->warn(std::move(msg));
}

enum class Severity { Warning, Error };

struct ValidationIssue {
  Severity severity{Severity::Warning};
  std::string channel;
  std::int64_t sample_index{-1};
  std::string message;
};

struct ChannelSummary {
  std::string name;
  Modality modality{Modality::EEG};
  double rate_hz{0.0};
  double duration_s{0.0};
  std::size_t gap_count{0};
  std::size_t nan_count{0};
};

struct ValidationReport {
  std::vector<ChannelSummary> channels;
  std::vector<ValidationIssue> issues;

  bool passed() const;
  bool has_warnings() const;
};

struct Recording {
  std::string subject_id;
  std::string task_id;
  std::vector<TimeSeries> series;
  std::map<Modality, std::int64_t> world_clock_offset_ms;
  std::optional<LabelTrack> label_track;
  // Per-sample +1 (FOG) / -1 on the aligned grid.
  std::optional<std::vector<int>> labels;
  bool aligned{false};
  bool preprocessed{false};
  bool ica_cleaned{false};
  ValidationReport validation;

  std::int64_t offset_ms(Modality m) const;
  std::vector<const TimeSeries*> channels_of(Modality m) const;
  std::vector<const TimeSeries*> feature_channels(Modality m) const;
  const TimeSeries* find(std::string_view name) const;
  TimeSeries* find(std::string_view name);
  std::size_t aligned_length() const;
};

}  // namespace fogkit
