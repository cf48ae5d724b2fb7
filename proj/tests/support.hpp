#pragma once

// Shared test helpers: a seeded generator with its own distributions, and
// independent reference implementations that the library code is checked
// against. Nothing here calls into the code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "fogkit/types.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("fogkit_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : g_(seed) {}
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {  // inclusive
    return lo + static_cast<std::int64_t>(g_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  double normal() {
    const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  std::vector<double> normals(std::size_t n, double sd = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = sd * normal();
    return v;
  }
  int sign() { return (g_() & 1U) ? 1 : -1; }
  std::mt19937_64& engine() { return g_; }

 private:
  std::mt19937_64 g_;
};

inline std::vector<double> sine(std::size_t n, double f_hz, double rate_hz, double amp = 1.0, double phase = 0.0) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = amp * std::sin(2.0 * std::numbers::pi * f_hz * static_cast<double>(k) / rate_hz + phase);
  }
  return v;
}

inline double rms(const std::vector<double>& x, std::size_t from = 0, std::size_t to = 0) {
  if (to == 0) to = x.size();
  double acc = 0.0;
  for (std::size_t k = from; k < to; ++k) acc += x[k] * x[k];
  return std::sqrt(acc / static_cast<double>(to - from));
}

inline double energy(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return acc;
}

inline fogkit::TimeSeries series(std::string name, fogkit::Modality m, double rate, std::int64_t t0,
                                 std::vector<double> samples) {
  fogkit::TimeSeries ts;
  ts.channel.name = std::move(name);
  ts.channel.modality = m;
  ts.channel.native_rate_hz = rate;
  ts.rate_hz = rate;
  ts.t0_ms = t0;
  ts.samples = std::move(samples);
  return ts;
}

// Amplitude of the f_hz component by direct correlation over whole periods.
inline double tone_amplitude(const std::vector<double>& x, double f_hz, double rate_hz, std::size_t from,
                             std::size_t to) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = from; k < to; ++k) {
    const double w = 2.0 * std::numbers::pi * f_hz * static_cast<double>(k) / rate_hz;
    re += x[k] * std::cos(w);
    im += x[k] * std::sin(w);
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(to - from);
}

// ---- reference implementations -------------------------------------------

struct MatchCounts {
  std::uint64_t b{0};
  std::uint64_t a{0};
};

// Every template pair, every coordinate; both lengths over the N - m starts.
inline MatchCounts brute_template_matches(const std::vector<double>& x, int m, double tol) {
  MatchCounts c;
  const std::size_t mm = static_cast<std::size_t>(m);
  if (x.size() <= mm) return c;
  const std::size_t count = x.size() - mm;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      double dm = 0.0;
      for (std::size_t k = 0; k < mm; ++k) dm = std::max(dm, std::abs(x[i + k] - x[j + k]));
      if (dm <= tol) {
        ++c.b;
        if (std::max(dm, std::abs(x[i + mm] - x[j + mm])) <= tol) ++c.a;
      }
    }
  }
  return c;
}

inline double brute_sample_entropy(const std::vector<double>& x, int m, double r) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  if (sd == 0.0) return 0.0;
  const auto c = brute_template_matches(x, m, r * sd);
  if (c.b == 0) return 0.0;
  if (c.a == 0) return std::log(static_cast<double>(c.b) + 1.0);
  return -std::log(static_cast<double>(c.a) / static_cast<double>(c.b));
}

// Fraction of (positive, negative) pairs ranked correctly, ties counting 1/2.
inline double pair_auc(const std::vector<int>& y, const std::vector<double>& s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j] != -1) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      else if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

// Counts windows by stepping a cursor.
inline std::size_t walk_windows(std::size_t n, std::size_t w, std::size_t s) {
  std::size_t count = 0;
  for (std::size_t start = 0; start + w <= n; start += s) ++count;
  return count;
}

// Direct O(n^2) DFT power |X_k|^2 for k = 0..n/2.
inline std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      re += x[t] * std::cos(w);
      im -= x[t] * std::sin(w);
    }
    p[k] = re * re + im * im;
  }
  return p;
}

// Dual objective sum(a) - 1/2 a'Qa with Q_ij = y_i y_j K_ij.
inline double dual_objective(const std::vector<double>& K, const std::vector<int>& y, const std::vector<double>& a) {
  const std::size_t n = y.size();
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < n; ++j) quad += a[i] * a[j] * y[i] * y[j] * K[i * n + j];
  }
  return lin - 0.5 * quad;
}

// Projection onto {0 <= a <= C, y'a = 0}: a = clip(v - lambda*y), with lambda
// found by bisection on the monotone map lambda -> y'a.
inline std::vector<double> project_feasible(const std::vector<double>& v, const std::vector<int>& y, double C) {
  const std::size_t n = v.size();
  auto at = [&](double lambda, std::vector<double>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::clamp(v[i] - lambda * y[i], 0.0, C);
      s += y[i] * a[i];
    }
    return s;
  };
  std::vector<double> a(n);
  double lo = -1e6, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (at(mid, a) > 0.0) lo = mid;
    else hi = mid;
  }
  at(0.5 * (lo + hi), a);
  return a;
}

// Accelerated projected gradient ascent on the dual; small problems only.
inline double reference_dual_optimum(const std::vector<double>& K, const std::vector<int>& y, double C,
                                     int iterations = 200000) {
  const std::size_t n = y.size();
  // Largest absolute row sum bounds the spectral norm of Q.
  double lipschitz = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n; ++j) row += std::abs(K[i * n + j]);
    lipschitz = std::max(lipschitz, row);
  }
  const double step = 1.0 / lipschitz;
  std::vector<double> a(n, 0.0), z = a, prev = a;
  double t = 1.0;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) {
      double q = 0.0;
      for (std::size_t j = 0; j < n; ++j) q += y[i] * y[j] * K[i * n + j] * z[j];
      g[i] = 1.0 - q;
    }
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = z[i] + step * g[i];
    prev = a;
    a = project_feasible(v, y, C);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    for (std::size_t i = 0; i < n; ++i) z[i] = a[i] + ((t - 1.0) / t_next) * (a[i] - prev[i]);
    t = t_next;
  }
  return dual_objective(K, y, a);
}

inline std::vector<double> gaussian_gram(const std::vector<std::vector<double>>& X, double gamma) {
  const std::size_t n = X.size();
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double d = 0.0;
      for (std::size_t c = 0; c < X[i].size(); ++c) d += (X[i][c] - X[j][c]) * (X[i][c] - X[j][c]);
      K[i * n + j] = std::exp(-gamma * d);
    }
  }
  return K;
}

// Two Gaussian blobs in `dim` dimensions, centers +/- sep/2 on the first axis.
struct Blobs {
  std::vector<std::vector<double>> X;
  std::vector<int> y;
};

inline Blobs make_blobs(Gen& g, std::size_t n, std::size_t dim, double sep, double sd = 1.0) {
  Blobs b;
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    std::vector<double> row(dim);
    for (auto& v : row) v = sd * g.normal();
    row[0] += label * sep / 2.0;
    b.X.push_back(std::move(row));
    b.y.push_back(label);
  }
  return b;
}

}  // namespace testing
