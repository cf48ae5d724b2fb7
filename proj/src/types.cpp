#include "fogkit/types.hpp"

#include <algorithm>
#include <cctype>

#include "fogkit/errors.hpp"

namespace fogkit {

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::EEG: return "EEG";
    case Modality::EMG: return "EMG";
    case Modality::ACC: return "ACC";
    case Modality::SC: return "SC";
  }
  return "?";
}

std::string_view file_stem(Modality m) {
  switch (m) {
    case Modality::EEG: return "eeg";
    case Modality::EMG: return "emg";
    case Modality::ACC: return "acc";
    case Modality::SC: return "sc";
  }
  return "?";
}

Modality parse_modality(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (Modality m : kAllModalities) {
    if (to_string(m) == upper) return m;
  }
  throw FormatError("unknown modality '" + std::string(text) + "'");
}

std::int64_t LabelTrack::total_ms() const {
  std::int64_t total = 0;
  for (const auto& iv : intervals) total += iv.length_ms();
  return total;
}

LabelTrack make_label_track(std::vector<Interval> intervals, std::string annotator_id) {
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (intervals[i].end_ms <= intervals[i].start_ms) {
      throw IntegrityError("label interval " + std::to_string(i) + " has end <= start (" +
                           std::to_string(intervals[i].start_ms) + ", " +
                           std::to_string(intervals[i].end_ms) + ")");
    }
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.start_ms < b.start_ms; });
  for (std::size_t i = 1; i < intervals.size(); ++i) {
    if (intervals[i].start_ms < intervals[i - 1].end_ms) {
      throw IntegrityError("label intervals overlap: (" + std::to_string(intervals[i - 1].start_ms) +
                           ", " + std::to_string(intervals[i - 1].end_ms) + ") and (" +
                           std::to_string(intervals[i].start_ms) + ", " +
                           std::to_string(intervals[i].end_ms) + ")");
    }
  }
  return LabelTrack{std::move(intervals), std::move(annotator_id)};
}

LabelTrack merge_label_tracks(const LabelTrack& a, const LabelTrack& b) {
  std::vector<Interval> all = a.intervals;
  all.insert(all.end(), b.intervals.begin(), b.intervals.end());
  std::sort(all.begin(), all.end(),
            [](const Interval& x, const Interval& y) { return x.start_ms < y.start_ms; });
  std::vector<Interval> fused;
  for (const auto& iv : all) {
    if (!fused.empty() && iv.start_ms <= fused.back().end_ms) {
      fused.back().end_ms = std::max(fused.back().end_ms, iv.end_ms);
    } else {
      fused.push_back(iv);
    }
  }
  std::string id = a.annotator_id;
  if (!b.annotator_id.empty() && b.annotator_id != id) {
    id = id.empty() ? b.annotator_id : id + "+" + b.annotator_id;
  }
  return LabelTrack{std::move(fused), std::move(id)};
}

bool ValidationReport::passed() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const ValidationIssue& i) { return i.severity == Severity::Error; });
}

bool ValidationReport::has_warnings() const {
  return std::any_of(issues.begin(), issues.end(),
                     [](const ValidationIssue& i) { return i.severity == Severity::Warning; });
}

std::int64_t Recording::offset_ms(Modality m) const {
  auto it = world_clock_offset_ms.find(m);
  return it == world_clock_offset_ms.end() ? 0 : it->second;
}

std::vector<const TimeSeries*> Recording::channels_of(Modality m) const {
  std::vector<const TimeSeries*> out;
  for (const auto& ts : series) {
    if (ts.channel.modality == m) out.push_back(&ts);
  }
  return out;
}

std::vector<const TimeSeries*> Recording::feature_channels(Modality m) const {
  std::vector<const TimeSeries*> out;
  for (const auto& ts : series) {
    if (ts.channel.modality == m && ts.channel.roles.feature_eligible()) out.push_back(&ts);
  }
  return out;
}

const TimeSeries* Recording::find(std::string_view name) const {
  for (const auto& ts : series) {
    if (ts.channel.name == name) return &ts;
  }
  return nullptr;
}

TimeSeries* Recording::find(std::string_view name) {
  for (auto& ts : series) {
    if (ts.channel.name == name) return &ts;
  }
  return nullptr;
}

std::size_t Recording::aligned_length() const {
  return series.empty() ? 0 : series.front().size();
}

}  // namespace fogkit
