#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fogkit/entropy.hpp"
#include "fogkit/segment.hpp"
#include "fogkit/spectral.hpp"
#include "fogkit/wavelet.hpp"

namespace fogkit {

// Bit set over the three feature-bearing modalities.
enum class FeatureMask : unsigned { None = 0, EEG = 1, EMG = 2, ACC = 4, All = 7 };

constexpr FeatureMask operator|(FeatureMask a, FeatureMask b) {
  return static_cast<FeatureMask>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}
constexpr bool has(FeatureMask set, FeatureMask bit) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(bit)) != 0;
}
// "EEG", "EMG", "ACC", "ALL" or '+'-joined combinations such as "EEG+ACC".
FeatureMask parse_feature_mask(std::string_view text);
std::string to_string(FeatureMask mask);

struct FeatureConfig {
  SampleEntropyParams sample_entropy;
  double emg_deadband{0.0};
  std::size_t eeg_channels{25};
  std::size_t emg_channels{3};
  std::vector<std::string> acc_channels{"LTibia_X", "LTibia_Y", "LTibia_Z"};
  double tp_lo_hz{0.5};
  double tp_hi_hz{16.0};
  FreezingBands freezing;
};

struct FeatureVector {
  std::vector<double> values;
  std::vector<std::string> manifest;
  FeatureMask mask{FeatureMask::None};

  void append(const FeatureVector& other);
};

struct EmgFeatures {
  double mav{0.0};
  double zc{0.0};
  double ssc{0.0};
  double wl{0.0};
};

// MAV = mean |x|; ZC counts sign changes with |x[k] - x[k+1]| > deadband;
// SSC counts interior points where both neighbouring differences exceed the
// deadband and change sign; WL = sum |x[k+1] - x[k]|.
EmgFeatures emg_features(std::span<const double> x, double deadband = 0.0);

// WE over the five rhythm components, computed from the DWT coefficients
// (equal to the reconstructed-component energies by orthogonality).
std::array<double, kRhythmCount> rhythm_energies(std::span<const double> x);

// Per channel: WE_delta, WE_theta, WE_alpha, TWE. Throws ChannelError when the
// channel count differs from cfg.eeg_channels.
FeatureVector eeg_features(std::span<const ChannelView> channels, const FeatureConfig& cfg = {},
                           Diagnostics* diag = nullptr);
// Per channel: MAV, ZC, SSC, WL.
FeatureVector emg_block(std::span<const ChannelView> channels, const FeatureConfig& cfg = {});
// Per configured axis: SE, STD, TP, FI.
FeatureVector acc_features(std::span<const ChannelView> channels, double rate_hz, const FeatureConfig& cfg = {},
                           Diagnostics* diag = nullptr);

// EEG || EMG || ACC restricted to mask. Throws SpecError on an empty mask.
FeatureVector extract_features(const Segment& seg, FeatureMask mask, double rate_hz, const FeatureConfig& cfg = {},
                               Diagnostics* diag = nullptr);

// Row-major feature table with per-row metadata.
struct FeatureTable {
  std::vector<std::string> manifest;
  std::vector<std::string> subject;
  std::vector<std::string> task;
  std::vector<std::size_t> start_index;
  std::vector<int> label;
  std::vector<std::vector<double>> rows;

  std::size_t size() const { return rows.size(); }
  void append(const FeatureTable& other);
  // Keeps the columns whose manifest name belongs to a modality in mask.
  FeatureTable select(FeatureMask mask) const;
  FeatureTable subset(std::span<const std::size_t> indices) const;
};

FeatureTable extract_feature_table(std::span<const Segment> segments, FeatureMask mask, double rate_hz,
                                   const FeatureConfig& cfg = {}, Diagnostics* diag = nullptr);

// Header: subject,task,start_index,label,<manifest...>
void write_feature_csv(const FeatureTable& table, const std::filesystem::path& file);
FeatureTable read_feature_csv(const std::filesystem::path& file);

}  // namespace fogkit
