#pragma once

#include <span>
#include <vector>

namespace fogkit {

// One-sided power spectral density of a mean-removed, periodic-Hann-windowed
// segment. Integrating psd over all bins returns the window-weighted signal
// power, which for stationary input estimates its variance.
struct Periodogram {
  double rate_hz{0.0};
  double bin_hz{0.0};
  std::vector<double> psd;

  double frequency(std::size_t k) const { return static_cast<double>(k) * bin_hz; }
  // Sum of psd * bin_hz over bins with lo <= f <= hi. Throws SpecError
  // unless lo < hi <= Nyquist.
  double band_power(double lo_hz, double hi_hz) const;
  double total_power() const;
};

Periodogram periodogram(std::span<const double> x, double rate_hz);

double band_power(std::span<const double> x, double rate_hz, double lo_hz, double hi_hz);

struct FreezingBands {
  double freeze_lo_hz{3.0};
  double freeze_hi_hz{8.0};
  double loco_lo_hz{0.5};
  double loco_hi_hz{3.0};
};

// Freeze-band power over locomotion-band power; the denominator is clamped
// from below at 1e-12 * (total power + 1), so a zero signal gives 0.
double freezing_index(const Periodogram& p, const FreezingBands& bands = {});
double freezing_index(std::span<const double> x, double rate_hz, const FreezingBands& bands = {});

}  // namespace fogkit
