#pragma once

#include <array>
#include <span>
#include <vector>

#include "fogkit/types.hpp"

namespace fogkit {

// Daubechies-4 (8-tap) orthonormal scaling filter, reconstruction order.
const std::array<double, 8>& db4_lowpass();

// Periodized orthogonal DWT coefficients of a signal whose length is a
// multiple of 2^levels. details[0] is level 1 (finest).
struct DwtCoefficients {
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
};

DwtCoefficients dwt(std::span<const double> x, int levels);
std::vector<double> idwt(const DwtCoefficients& c);

enum class Rhythm { Delta = 0, Theta, Alpha, Beta, Gamma };
inline constexpr std::size_t kRhythmCount = 5;
inline constexpr int kRhythmLevels = 6;

struct RhythmBand {
  Rhythm rhythm;
  const char* name;
  double lo_hz;
  double hi_hz;
};

// Delta 0-3.9, theta 3.9-7.8, alpha 7.8-15.6, beta 15.6-31.3, gamma 31.3-62.5 Hz.
const std::array<RhythmBand, kRhythmCount>& rhythm_bands();

// Six-level decomposition at 500 Hz: gamma <- d3, beta <- d4, alpha <- d5,
// theta <- d6, delta <- a6; d1 and d2 are kept as residual components.
//
// The transform runs on the segment zero-padded to the next multiple of 64
// samples, and every component is the full-support reconstruction over that
// padded length (its first segment_length samples line up with the input).
// Over the padded support the components are mutually orthogonal, so their
// energies add up to the input energy exactly.
struct RhythmDecomposition {
  std::array<std::vector<double>, kRhythmCount> rhythm;
  std::array<std::vector<double>, 2> residual;
  std::size_t segment_length{0};

  const std::vector<double>& operator[](Rhythm r) const { return rhythm[static_cast<std::size_t>(r)]; }
};

// Throws LengthError for fewer than 64 samples.
RhythmDecomposition dwt_rhythms(std::span<const double> x);

// Sum of squares over the component.
double wavelet_energy(std::span<const double> component);

// Shannon entropy (natural log) of the normalized energies; all-zero input
// gives 0 with a warning, a negative entry throws DomainError.
double total_wavelet_entropy(std::span<const double> energies, Diagnostics* diag = nullptr);

}  // namespace fogkit
