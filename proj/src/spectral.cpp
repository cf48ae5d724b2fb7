#include "fogkit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "fogkit/errors.hpp"

namespace fogkit {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffers {
  double* in{nullptr};
  fftw_complex* out{nullptr};
  fftw_plan plan{nullptr};

  explicit FftwBuffers(std::size_t n) {
    std::lock_guard<std::mutex> lock(planner_mutex());
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
  }
  ~FftwBuffers() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;
};

constexpr double kBinSlack = 1e-9;

}  // namespace

Periodogram periodogram(std::span<const double> x, double rate_hz) {
  if (!(rate_hz > 0.0)) throw SpecError("sample rate must be positive");
  Periodogram p;
  p.rate_hz = rate_hz;
  const std::size_t n = x.size();
  if (n < 2) {
    p.bin_hz = rate_hz;
    p.psd.assign(1, 0.0);
    return p;
  }
  p.bin_hz = rate_hz / static_cast<double>(n);

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  FftwBuffers fft(n);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    fft.in[i] = w * (x[i] - mean);
    wsum2 += w * w;
  }
  fftw_execute(fft.plan);

  const std::size_t bins = n / 2 + 1;
  p.psd.resize(bins);
  const double scale = 1.0 / (rate_hz * wsum2);
  for (std::size_t k = 0; k < bins; ++k) {
    const double re = fft.out[k][0], im = fft.out[k][1];
    double v = (re * re + im * im) * scale;
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    if (!unpaired) v *= 2.0;
    p.psd[k] = v;
  }
  return p;
}

double Periodogram::band_power(double lo_hz, double hi_hz) const {
  if (!(lo_hz < hi_hz)) throw SpecError("band power needs lo < hi");
  if (hi_hz > rate_hz / 2.0 + kBinSlack) throw SpecError("band upper edge exceeds Nyquist");
  double acc = 0.0;
  for (std::size_t k = 0; k < psd.size(); ++k) {
    const double f = frequency(k);
    if (f + kBinSlack >= lo_hz && f - kBinSlack <= hi_hz) acc += psd[k];
  }
  return acc * bin_hz;
}

double Periodogram::total_power() const {
  double acc = 0.0;
  for (double v : psd) acc += v;
  return acc * bin_hz;
}

double band_power(std::span<const double> x, double rate_hz, double lo_hz, double hi_hz) {
  if (!(lo_hz < hi_hz)) throw SpecError("band power needs lo < hi");
  return periodogram(x, rate_hz).band_power(lo_hz, hi_hz);
}

double freezing_index(const Periodogram& p, const FreezingBands& bands) {
  const double freeze = p.band_power(bands.freeze_lo_hz, bands.freeze_hi_hz);
  const double loco = p.band_power(bands.loco_lo_hz, bands.loco_hi_hz);
  const double floor = 1e-12 * (p.total_power() + 1.0);
  return freeze / std::max(loco, floor);
}

double freezing_index(std::span<const double> x, double rate_hz, const FreezingBands& bands) {
  return freezing_index(periodogram(x, rate_hz), bands);
}

}  // namespace fogkit
