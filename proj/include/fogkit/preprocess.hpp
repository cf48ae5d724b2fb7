#pragma once

#include <string>

#include "fogkit/filter.hpp"
#include "fogkit/types.hpp"

namespace fogkit {

struct PreprocessConfig {
  double eeg_band_lo_hz{0.5};
  double eeg_band_hi_hz{100.0};
  // The EEG band needs a steeper skirt than the other filters to push
  // 120 Hz content 40 dB down at a 500 Hz rate.
  int eeg_order{10};
  double emg_band_lo_hz{10.0};
  double emg_band_hi_hz{500.0};
  double acc_lowpass_hz{16.0};
  double notch_hz{50.0};
  double notch_width_hz{2.0};
  int order{4};
  bool zero_phase{true};
  std::string reference_a{"TP9"};
  std::string reference_b{"TP10"};
};

// Per-channel z-score (population SD). A constant input maps to zeros and
// records a warning.
TimeSeries zscore_normalize(const TimeSeries& ts, Diagnostics* diag = nullptr);

// Subtracts the mean of the two mastoid references from every EEG channel
// that is neither a reference nor EOG, and flags both references so they
// leave the feature-eligible set. Throws ChannelError if either is missing.
Recording rereference_eeg(const Recording& r, const PreprocessConfig& cfg = {});

// Filter chain for one modality on an aligned recording:
//   EEG  re-reference, band-pass, notch, normalize
//   EMG  band-pass (high-pass when the upper edge is at or above Nyquist), notch, normalize
//   ACC  low-pass, notch, normalize
//   SC   notch, normalize
Recording preprocess_modality(const Recording& r, Modality m, const PreprocessConfig& cfg = {},
                              Diagnostics* diag = nullptr);

// All modalities present in r, in EEG, EMG, ACC, SC order.
Recording preprocess_recording(const Recording& r, const PreprocessConfig& cfg = {},
                               Diagnostics* diag = nullptr);

// The filters preprocess_modality applies to a channel of modality m sampled at rate_hz.
std::vector<FilterSpec> modality_filters(Modality m, double rate_hz, const PreprocessConfig& cfg);

}  // namespace fogkit
