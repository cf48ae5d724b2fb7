#pragma once

#include <span>
#include <vector>

#include "fogkit/types.hpp"

namespace fogkit {

enum class FilterKind { Lowpass, Highpass, Bandpass, Notch };

struct FilterSpec {
  FilterKind kind{FilterKind::Lowpass};
  // Lowpass/Highpass: {cutoff}. Bandpass: {lo, hi}. Notch: {center}.
  std::vector<double> edges_hz;
  int order{4};
  bool zero_phase{true};
  // Full stopband width of a notch, centered on edges_hz[0].
  double notch_width_hz{2.0};

  static FilterSpec lowpass(double cutoff, int order = 4) { return {FilterKind::Lowpass, {cutoff}, order}; }
  static FilterSpec highpass(double cutoff, int order = 4) { return {FilterKind::Highpass, {cutoff}, order}; }
  static FilterSpec bandpass(double lo, double hi, int order = 4) { return {FilterKind::Bandpass, {lo, hi}, order}; }
  static FilterSpec notch(double center, int order = 4) { return {FilterKind::Notch, {center}, order}; }
};

// Second-order section in transfer-function form with a0 == 1.
struct Biquad {
  double b0{1.0}, b1{0.0}, b2{0.0};
  double a1{0.0}, a2{0.0};
};

using SosFilter = std::vector<Biquad>;

// Throws SpecError when the filter is not realizable at rate_hz.
void check_filter_spec(const FilterSpec& spec, double rate_hz);

// Digital Butterworth design through the bilinear transform with prewarped
// edges. Bandpass and notch designs have 2*order poles.
SosFilter design_butterworth(const FilterSpec& spec, double rate_hz);

// Causal cascade; the state starts at the step-response steady state for x[0].
std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x);
// Forward-backward with odd extension at both ends (zero phase, squared magnitude).
std::vector<double> sos_filtfilt(const SosFilter& sos, std::span<const double> x);

// |H(e^{jw})| of the cascade at frequency f.
double magnitude_response(const SosFilter& sos, double f_hz, double rate_hz);

TimeSeries apply_filter(const TimeSeries& ts, const FilterSpec& spec);

}  // namespace fogkit
