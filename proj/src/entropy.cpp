#include "fogkit/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "fogkit/errors.hpp"

namespace fogkit {

TemplateMatches count_template_matches(std::span<const double> x, int m, double tolerance) {
  TemplateMatches out;
  if (m < 1) throw DomainError("embedding dimension must be >= 1");
  const std::size_t mm = static_cast<std::size_t>(m);
  if (x.size() <= mm) return out;
  const std::size_t count = x.size() - mm;

  // Sorting template starts by their first value lets the inner scan stop as
  // soon as the first coordinate is out of tolerance.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && a < b);
  });

  for (std::size_t oi = 0; oi < count; ++oi) {
    const std::size_t i = order[oi];
    const double xi = x[i];
    for (std::size_t oj = oi + 1; oj < count; ++oj) {
      const std::size_t j = order[oj];
      if (x[j] - xi > tolerance) break;
      bool match = true;
      for (std::size_t k = 1; k < mm; ++k) {
        if (std::abs(x[i + k] - x[j + k]) > tolerance) {
          match = false;
          break;
        }
      }
      if (!match) continue;
      ++out.length_m;
      if (std::abs(x[i + mm] - x[j + mm]) <= tolerance) ++out.length_m1;
    }
  }
  return out;
}

double sample_entropy(std::span<const double> x, const SampleEntropyParams& p, Diagnostics* diag) {
  if (p.m < 1) throw DomainError("embedding dimension must be >= 1");
  if (!(p.r > 0.0)) throw DomainError("tolerance fraction must be positive");
  const std::size_t n = x.size();
  if (n < static_cast<std::size_t>(p.m) + 2) {
    warn(diag, "sample entropy input shorter than m + 2; returning 0");
    return 0.0;
  }
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  if (!(sd > 0.0)) return 0.0;

  const TemplateMatches c = count_template_matches(x, p.m, p.r * sd);
  if (c.length_m == 0) {
    warn(diag, "sample entropy: no template matches at length m; returning 0");
    return 0.0;
  }
  if (c.length_m1 == 0) return std::log(static_cast<double>(c.length_m) + 1.0);
  return -std::log(static_cast<double>(c.length_m1) / static_cast<double>(c.length_m));
}

}  // namespace fogkit
