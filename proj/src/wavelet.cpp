#include "fogkit/wavelet.hpp"

#include <cmath>

#include "fogkit/errors.hpp"

namespace fogkit {

const std::array<double, 8>& db4_lowpass() {
  static const std::array<double, 8> h = {
      0.23037781330885523,  0.7148465705525415,  0.6308807679295904,   -0.02798376941698385,
      -0.18703481171888114, 0.030841381835986965, 0.032883011666982945, -0.010597401784997278};
  return h;
}

namespace {

std::array<double, 8> db4_highpass() {
  const auto& h = db4_lowpass();
  std::array<double, 8> g{};
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    g[k] = sign * h[h.size() - 1 - k];
  }
  return g;
}

void analysis_step(std::span<const double> x, std::vector<double>& lo, std::vector<double>& hi) {
  const auto& h = db4_lowpass();
  static const auto g = db4_highpass();
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  lo.assign(half, 0.0);
  hi.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double v = x[(2 * i + k) % n];
      a += h[k] * v;
      d += g[k] * v;
    }
    lo[i] = a;
    hi[i] = d;
  }
}

std::vector<double> synthesis_step(std::span<const double> lo, std::span<const double> hi) {
  const auto& h = db4_lowpass();
  static const auto g = db4_highpass();
  const std::size_t half = lo.size();
  const std::size_t n = 2 * half;
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t k = 0; k < h.size(); ++k) {
      x[(2 * i + k) % n] += h[k] * lo[i] + g[k] * hi[i];
    }
  }
  return x;
}

}  // namespace

DwtCoefficients dwt(std::span<const double> x, int levels) {
  if (levels < 1) throw LengthError("DWT needs at least one level");
  const std::size_t block = std::size_t{1} << levels;
  if (x.empty() || x.size() % block != 0) {
    throw LengthError("DWT input length " + std::to_string(x.size()) + " is not a positive multiple of " +
                      std::to_string(block));
  }
  DwtCoefficients c;
  std::vector<double> cur(x.begin(), x.end());
  for (int l = 0; l < levels; ++l) {
    std::vector<double> lo, hi;
    analysis_step(cur, lo, hi);
    c.details.push_back(std::move(hi));
    cur = std::move(lo);
  }
  c.approx = std::move(cur);
  return c;
}

std::vector<double> idwt(const DwtCoefficients& c) {
  std::vector<double> cur = c.approx;
  for (std::size_t l = c.details.size(); l-- > 0;) cur = synthesis_step(cur, c.details[l]);
  return cur;
}

const std::array<RhythmBand, kRhythmCount>& rhythm_bands() {
  static const std::array<RhythmBand, kRhythmCount> bands = {{
      {Rhythm::Delta, "delta", 0.0, 3.9},
      {Rhythm::Theta, "theta", 3.9, 7.8},
      {Rhythm::Alpha, "alpha", 7.8, 15.6},
      {Rhythm::Beta, "beta", 15.6, 31.3},
      {Rhythm::Gamma, "gamma", 31.3, 62.5},
  }};
  return bands;
}

RhythmDecomposition dwt_rhythms(std::span<const double> x) {
  constexpr std::size_t block = std::size_t{1} << kRhythmLevels;
  if (x.size() < block) {
    throw LengthError("rhythm decomposition needs at least " + std::to_string(block) + " samples, got " +
                      std::to_string(x.size()));
  }
  const std::size_t padded = (x.size() + block - 1) / block * block;
  std::vector<double> buf(padded, 0.0);
  std::copy(x.begin(), x.end(), buf.begin());
  const DwtCoefficients full = dwt(buf, kRhythmLevels);

  // Reconstruct one band with every other coefficient set to zero.
  auto only = [&full](int detail_level) {
    DwtCoefficients c;
    c.details.resize(full.details.size());
    for (std::size_t l = 0; l < full.details.size(); ++l) {
      c.details[l].assign(full.details[l].size(), 0.0);
    }
    c.approx.assign(full.approx.size(), 0.0);
    if (detail_level == 0) c.approx = full.approx;
    else c.details[static_cast<std::size_t>(detail_level - 1)] = full.details[static_cast<std::size_t>(detail_level - 1)];
    return idwt(c);
  };

  RhythmDecomposition out;
  out.segment_length = x.size();
  out.rhythm[static_cast<std::size_t>(Rhythm::Delta)] = only(0);
  out.rhythm[static_cast<std::size_t>(Rhythm::Theta)] = only(6);
  out.rhythm[static_cast<std::size_t>(Rhythm::Alpha)] = only(5);
  out.rhythm[static_cast<std::size_t>(Rhythm::Beta)] = only(4);
  out.rhythm[static_cast<std::size_t>(Rhythm::Gamma)] = only(3);
  out.residual[0] = only(1);
  out.residual[1] = only(2);
  return out;
}

double wavelet_energy(std::span<const double> component) {
  double e = 0.0;
  for (double v : component) e += v * v;
  return e;
}

double total_wavelet_entropy(std::span<const double> energies, Diagnostics* diag) {
  double total = 0.0;
  for (double e : energies) {
    if (e < 0.0 || std::isnan(e)) throw DomainError("wavelet energies must be non-negative");
    total += e;
  }
  if (!(total > 0.0)) {
    warn(diag, "all wavelet energies are zero; entropy set to 0");
    return 0.0;
  }
  double h = 0.0;
  for (double e : energies) {
    if (e == 0.0) continue;
    const double p = e / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

}  // namespace fogkit
