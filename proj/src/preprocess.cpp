#include "fogkit/preprocess.hpp"

#include <cmath>

#include "fogkit/errors.hpp"

namespace fogkit {

TimeSeries zscore_normalize(const TimeSeries& ts, Diagnostics* diag) {
  TimeSeries out = ts;
  const std::size_t n = ts.size();
  if (n == 0) return out;
  double mean = 0.0;
  for (double v : ts.samples) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : ts.samples) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double sd = std::sqrt(var);
  if (!(sd > 0.0) || sd <= 1e-12 * std::max(1.0, std::abs(mean))) {
    std::fill(out.samples.begin(), out.samples.end(), 0.0);
    warn(diag, "channel " + ts.channel.name + " is constant; normalized to zeros");
    return out;
  }
  for (double& v : out.samples) v = (v - mean) / sd;
  return out;
}

Recording rereference_eeg(const Recording& r, const PreprocessConfig& cfg) {
  const TimeSeries* a = r.find(cfg.reference_a);
  const TimeSeries* b = r.find(cfg.reference_b);
  if (!a || !b) {
    throw ChannelError("re-referencing needs channels " + cfg.reference_a + " and " + cfg.reference_b);
  }
  if (a->size() != b->size()) throw ChannelError("reference channels differ in length");
  std::vector<double> ref(a->size());
  for (std::size_t k = 0; k < ref.size(); ++k) ref[k] = (a->samples[k] + b->samples[k]) / 2.0;

  Recording out = r;
  for (auto& ts : out.series) {
    if (ts.channel.modality != Modality::EEG) continue;
    if (ts.channel.name == cfg.reference_a || ts.channel.name == cfg.reference_b) {
      ts.channel.roles.reference = true;
      continue;
    }
    if (ts.channel.roles.reference || ts.channel.roles.eog) continue;
    if (ts.size() != ref.size()) {
      throw ChannelError("channel " + ts.channel.name + " length differs from reference; align first");
    }
    for (std::size_t k = 0; k < ref.size(); ++k) ts.samples[k] -= ref[k];
  }
  return out;
}

std::vector<FilterSpec> modality_filters(Modality m, double rate_hz, const PreprocessConfig& cfg) {
  std::vector<FilterSpec> chain;
  switch (m) {
    case Modality::EEG:
      chain.push_back(FilterSpec::bandpass(cfg.eeg_band_lo_hz, cfg.eeg_band_hi_hz, cfg.eeg_order));
      break;
    case Modality::EMG:
      if (cfg.emg_band_hi_hz < rate_hz / 2.0) {
        chain.push_back(FilterSpec::bandpass(cfg.emg_band_lo_hz, cfg.emg_band_hi_hz, cfg.order));
      } else {
        chain.push_back(FilterSpec::highpass(cfg.emg_band_lo_hz, cfg.order));
      }
      break;
    case Modality::ACC:
      chain.push_back(FilterSpec::lowpass(cfg.acc_lowpass_hz, cfg.order));
      break;
    case Modality::SC:
      break;
  }
  FilterSpec notch = FilterSpec::notch(cfg.notch_hz, cfg.order);
  notch.notch_width_hz = cfg.notch_width_hz;
  chain.push_back(notch);
  for (auto& f : chain) f.zero_phase = cfg.zero_phase;
  return chain;
}

Recording preprocess_modality(const Recording& r, Modality m, const PreprocessConfig& cfg, Diagnostics* diag) {
  Recording out = m == Modality::EEG ? rereference_eeg(r, cfg) : r;
  for (auto& ts : out.series) {
    if (ts.channel.modality != m) continue;
    TimeSeries cur = ts;
    for (const auto& spec : modality_filters(m, ts.rate_hz, cfg)) cur = apply_filter(cur, spec);
    ts = zscore_normalize(cur, diag);
  }
  return out;
}

Recording preprocess_recording(const Recording& r, const PreprocessConfig& cfg, Diagnostics* diag) {
  Recording out = r;
  for (Modality m : kAllModalities) {
    if (!out.channels_of(m).empty()) out = preprocess_modality(out, m, cfg, diag);
  }
  out.preprocessed = true;
  return out;
}

}  // namespace fogkit
