#pragma once

#include <cstdint>
#include <span>

#include "fogkit/types.hpp"

namespace fogkit {

struct SampleEntropyParams {
  int m{2};
  // Tolerance as a fraction of the population SD of the input.
  double r{0.2};
};

struct TemplateMatches {
  std::uint64_t length_m{0};   // B: pairs matching over m points
  std::uint64_t length_m1{0};  // A: pairs matching over m + 1 points
};

// Counts unordered template pairs (i < j, both starting in [0, N - m)) whose
// Chebyshev distance is <= tolerance, over m and m + 1 points.
TemplateMatches count_template_matches(std::span<const double> x, int m, double tolerance);

// SampEn = -ln(A / B). Fallbacks: SD == 0 -> 0; B == 0 -> 0 with a warning;
// A == 0 < B -> ln(B + 1).
double sample_entropy(std::span<const double> x, const SampleEntropyParams& p = {}, Diagnostics* diag = nullptr);

}  // namespace fogkit
