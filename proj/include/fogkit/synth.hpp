#pragma once

#include <cstdint>
#include <vector>

#include "fogkit/types.hpp"

namespace fogkit {

struct SynthParams {
  int subjects{2};
  double duration_s{120.0};
  int episodes_per_subject{5};
  double episode_min_s{8.0};
  double episode_max_s{16.0};
  // Quiet standing before walking starts; no episodes are placed in it.
  double lead_in_s{5.0};
  double eeg_rate_hz{1000.0};
  double emg_rate_hz{1000.0};
  double acc_rate_hz{500.0};
  double sc_rate_hz{500.0};
  // Largest |world_clock_offset_ms| drawn per subsystem.
  std::int64_t max_clock_offset_ms{2000};
  double noise{1.0};
};

// Multimodal recordings with the full channel inventory (28 EEG incl. TP9,
// TP10 references and IO, 3 EMG, 4 three-axis ACC sensors, 1 SC), raw
// subsystem clocks and a FOG label track. Walking puts ACC energy at the
// cadence (below 3 Hz); FOG puts it in 3-8 Hz, raises EEG theta, lowers
// alpha and switches EMG bursts to a fast, weaker pattern. Episodes are
// placed one per equal slot after the lead-in. Output is a pure function of
// (params, seed).
std::vector<Recording> synth_dataset(const SynthParams& params, std::uint64_t seed);

// 28-channel EEG montage in acquisition order.
const std::vector<std::string>& eeg_montage();
const std::vector<std::string>& emg_channel_names();
// "<sensor>_<axis>" for LTibia, RTibia, Lumbar, Wrist and axes X, Y, Z.
std::vector<std::string> acc_channel_names();

}  // namespace fogkit
