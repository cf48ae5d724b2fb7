#pragma once

#include <filesystem>

#include "fogkit/types.hpp"

namespace fogkit {

// On-disk layout of one recording directory (<subject>/<task>/):
//
//   meta.json   subject/task ids, state flags and one entry per subsystem with
//               rate_hz, t0_ms, world_clock_offset_ms and the ordered channel
//               list ({"name", "flags": ["reference"|"eog"|"excluded"]}).
//   eeg.csv ... one file per subsystem listed in meta.json. Header row is
//               "timestamp_ms,<channel>,..."; every row is an integer
//               millisecond timestamp followed by one decimal value per channel.
//   labels.csv  optional "start_ms,end_ms" rows on the world clock.
//
// Values are written in shortest round-trip form, so save(load(dir)) is
// byte-identical for directories produced by save_recording.
inline constexpr int kFormatVersion = 1;

Recording load_recording(const std::filesystem::path& dir);
void save_recording(const Recording& r, const std::filesystem::path& dir);

LabelTrack load_labels(const std::filesystem::path& file);
void save_labels(const LabelTrack& track, const std::filesystem::path& file);

// Never throws on content problems; everything is reported as issues.
ValidationReport validate_recording(const Recording& r);

// Shortest decimal text that parses back to exactly v.
std::string format_double(double v);

}  // namespace fogkit
