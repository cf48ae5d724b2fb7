#include "fogkit/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include "fogkit/errors.hpp"

namespace fogkit {

namespace {

using cplx = std::complex<double>;

struct Zpk {
  std::vector<cplx> z;
  std::vector<cplx> p;
  double k{1.0};
};

Zpk analog_prototype(int order) {
  Zpk out;
  for (int m = -order + 1; m < order; m += 2) {
    const double theta = std::numbers::pi * m / (2.0 * order);
    out.p.push_back(-std::exp(cplx(0.0, theta)));
  }
  return out;
}

cplx prod_neg(const std::vector<cplx>& v) {
  cplx acc(1.0, 0.0);
  for (const auto& x : v) acc *= -x;
  return acc;
}

Zpk to_lowpass(const Zpk& in, double wo) {
  Zpk out = in;
  for (auto& z : out.z) z *= wo;
  for (auto& p : out.p) p *= wo;
  out.k *= std::pow(wo, static_cast<double>(in.p.size() - in.z.size()));
  return out;
}

Zpk to_highpass(const Zpk& in, double wo) {
  Zpk out;
  for (const auto& z : in.z) out.z.push_back(wo / z);
  for (const auto& p : in.p) out.p.push_back(wo / p);
  out.z.insert(out.z.end(), in.p.size() - in.z.size(), cplx(0.0, 0.0));
  out.k = in.k * std::real(prod_neg(in.z) / prod_neg(in.p));
  return out;
}

Zpk to_bandpass(const Zpk& in, double wo, double bw) {
  Zpk out;
  auto expand = [&](const std::vector<cplx>& roots, std::vector<cplx>& dst) {
    for (const auto& r : roots) {
      const cplx s = r * (bw / 2.0);
      const cplx d = std::sqrt(s * s - wo * wo);
      dst.push_back(s + d);
      dst.push_back(s - d);
    }
  };
  expand(in.z, out.z);
  expand(in.p, out.p);
  out.z.insert(out.z.end(), in.p.size() - in.z.size(), cplx(0.0, 0.0));
  out.k = in.k * std::pow(bw, static_cast<double>(in.p.size() - in.z.size()));
  return out;
}

Zpk to_bandstop(const Zpk& in, double wo, double bw) {
  Zpk out;
  auto expand = [&](const std::vector<cplx>& roots, std::vector<cplx>& dst) {
    for (const auto& r : roots) {
      const cplx s = (bw / 2.0) / r;
      const cplx d = std::sqrt(s * s - wo * wo);
      dst.push_back(s + d);
      dst.push_back(s - d);
    }
  };
  expand(in.z, out.z);
  expand(in.p, out.p);
  const std::size_t degree = in.p.size() - in.z.size();
  for (std::size_t i = 0; i < degree; ++i) {
    out.z.emplace_back(0.0, wo);
    out.z.emplace_back(0.0, -wo);
  }
  out.k = in.k * std::real(prod_neg(in.z) / prod_neg(in.p));
  return out;
}

Zpk bilinear(const Zpk& in, double fs) {
  const double fs2 = 2.0 * fs;
  Zpk out;
  cplx num(1.0, 0.0), den(1.0, 0.0);
  for (const auto& z : in.z) {
    out.z.push_back((fs2 + z) / (fs2 - z));
    num *= fs2 - z;
  }
  for (const auto& p : in.p) {
    out.p.push_back((fs2 + p) / (fs2 - p));
    den *= fs2 - p;
  }
  out.z.insert(out.z.end(), in.p.size() - in.z.size(), cplx(-1.0, 0.0));
  out.k = in.k * std::real(num / den);
  return out;
}

// Pairs each pole (or conjugate pair) with the nearest remaining zeros,
// starting from the poles closest to the unit circle.
SosFilter zpk_to_sos(const Zpk& zpk) {
  constexpr double kImagTol = 1e-10;
  std::vector<cplx> poles;
  std::vector<cplx> real_poles;
  for (const auto& p : zpk.p) {
    if (std::abs(p.imag()) <= kImagTol * std::max(1.0, std::abs(p))) real_poles.push_back(p.real());
    else if (p.imag() > 0) poles.push_back(p);
  }
  std::vector<cplx> zeros = zpk.z;
  for (auto& z : zeros) {
    if (std::abs(z.imag()) <= kImagTol * std::max(1.0, std::abs(z))) z = cplx(z.real(), 0.0);
  }

  auto by_circle_distance = [](const cplx& a, const cplx& b) {
    return (1.0 - std::abs(a)) < (1.0 - std::abs(b));
  };
  std::sort(poles.begin(), poles.end(), by_circle_distance);
  std::sort(real_poles.begin(), real_poles.end(), by_circle_distance);

  auto take_nearest = [&zeros](const cplx& target, bool real_only) -> cplx {
    std::size_t best = zeros.size();
    double best_d = 0.0;
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      if (real_only && zeros[i].imag() != 0.0) continue;
      if (!real_only && zeros[i].imag() < 0.0) continue;
      const double d = std::abs(zeros[i] - target);
      if (best == zeros.size() || d < best_d) {
        best = i;
        best_d = d;
      }
    }
    if (best == zeros.size()) throw SpecError("internal: unpaired filter zero");
    const cplx z = zeros[best];
    zeros.erase(zeros.begin() + static_cast<std::ptrdiff_t>(best));
    if (z.imag() > 0.0) {
      // Remove the conjugate partner as well.
      auto it = std::min_element(zeros.begin(), zeros.end(), [&](const cplx& a, const cplx& b) {
        return std::abs(a - std::conj(z)) < std::abs(b - std::conj(z));
      });
      zeros.erase(it);
    }
    return z;
  };

  SosFilter sos;
  for (const auto& p : poles) {
    Biquad q;
    q.a1 = -2.0 * p.real();
    q.a2 = std::norm(p);
    const cplx z1 = take_nearest(p, false);
    if (z1.imag() != 0.0) {
      q.b1 = -2.0 * z1.real();
      q.b2 = std::norm(z1);
    } else {
      const cplx z2 = take_nearest(p, true);
      q.b1 = -(z1.real() + z2.real());
      q.b2 = z1.real() * z2.real();
    }
    sos.push_back(q);
  }
  for (std::size_t i = 0; i < real_poles.size(); i += 2) {
    Biquad q;
    if (i + 1 < real_poles.size()) {
      const double p1 = real_poles[i].real(), p2 = real_poles[i + 1].real();
      q.a1 = -(p1 + p2);
      q.a2 = p1 * p2;
      const cplx z1 = take_nearest(real_poles[i], true);
      const cplx z2 = take_nearest(real_poles[i + 1], true);
      q.b1 = -(z1.real() + z2.real());
      q.b2 = z1.real() * z2.real();
    } else {
      q.a1 = -real_poles[i].real();
      const cplx z1 = take_nearest(real_poles[i], true);
      q.b1 = -z1.real();
    }
    sos.push_back(q);
  }
  if (sos.empty()) sos.push_back(Biquad{});
  sos.front().b0 *= zpk.k;
  sos.front().b1 *= zpk.k;
  sos.front().b2 *= zpk.k;
  return sos;
}

// Steady-state section states for a unit step, scaled through the cascade.
std::vector<std::array<double, 2>> step_states(const SosFilter& sos) {
  std::vector<std::array<double, 2>> zi(sos.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    const double bsum = q.b0 + q.b1 + q.b2;
    const double asum = 1.0 + q.a1 + q.a2;
    const double y = bsum / asum;
    const double z2 = q.b2 - q.a2 * y;
    const double z1 = q.b1 - q.a1 * y + z2;
    zi[s] = {scale * z1, scale * z2};
    scale *= y;
  }
  return zi;
}

std::vector<double> run_cascade(const SosFilter& sos, std::span<const double> x,
                                std::vector<std::array<double, 2>> state) {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    double z1 = state[s][0], z2 = state[s][1];
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<std::array<double, 2>> scaled(std::vector<std::array<double, 2>> zi, double x0) {
  for (auto& s : zi) {
    s[0] *= x0;
    s[1] *= x0;
  }
  return zi;
}

}  // namespace

void check_filter_spec(const FilterSpec& spec, double rate_hz) {
  if (!(rate_hz > 0.0)) throw SpecError("sample rate must be positive");
  if (spec.order < 1) throw SpecError("filter order must be >= 1");
  const double nyquist = rate_hz / 2.0;
  const std::size_t want = spec.kind == FilterKind::Bandpass ? 2 : 1;
  if (spec.edges_hz.size() != want) {
    throw SpecError("filter needs " + std::to_string(want) + " edge frequenc" + (want == 1 ? "y" : "ies"));
  }
  std::vector<double> edges = spec.edges_hz;
  if (spec.kind == FilterKind::Notch) {
    if (!(spec.notch_width_hz > 0.0)) throw SpecError("notch width must be positive");
    edges = {spec.edges_hz[0] - spec.notch_width_hz / 2.0, spec.edges_hz[0] + spec.notch_width_hz / 2.0};
  }
  for (double e : edges) {
    if (!(e > 0.0)) throw SpecError("filter edges must be positive");
    if (e >= nyquist) {
      throw SpecError("filter edge " + std::to_string(e) + " Hz is not below Nyquist (" +
                      std::to_string(nyquist) + " Hz)");
    }
  }
  if (edges.size() == 2 && !(edges[0] < edges[1])) throw SpecError("band edges must satisfy lo < hi");
}

SosFilter design_butterworth(const FilterSpec& spec, double rate_hz) {
  check_filter_spec(spec, rate_hz);
  auto warp = [rate_hz](double f) { return 2.0 * rate_hz * std::tan(std::numbers::pi * f / rate_hz); };
  Zpk analog = analog_prototype(spec.order);
  switch (spec.kind) {
    case FilterKind::Lowpass: analog = to_lowpass(analog, warp(spec.edges_hz[0])); break;
    case FilterKind::Highpass: analog = to_highpass(analog, warp(spec.edges_hz[0])); break;
    case FilterKind::Bandpass: {
      const double lo = warp(spec.edges_hz[0]), hi = warp(spec.edges_hz[1]);
      analog = to_bandpass(analog, std::sqrt(lo * hi), hi - lo);
      break;
    }
    case FilterKind::Notch: {
      const double lo = warp(spec.edges_hz[0] - spec.notch_width_hz / 2.0);
      const double hi = warp(spec.edges_hz[0] + spec.notch_width_hz / 2.0);
      analog = to_bandstop(analog, std::sqrt(lo * hi), hi - lo);
      break;
    }
  }
  return zpk_to_sos(bilinear(analog, rate_hz));
}

std::vector<double> sos_filter(const SosFilter& sos, std::span<const double> x) {
  if (x.empty()) return {};
  return run_cascade(sos, x, scaled(step_states(sos), x[0]));
}

std::vector<double> sos_filtfilt(const SosFilter& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) return {x.begin(), x.end()};
  std::size_t trailing_b = 0, trailing_a = 0;
  for (const auto& q : sos) {
    trailing_b += q.b2 == 0.0;
    trailing_a += q.a2 == 0.0;
  }
  std::size_t padlen = 3 * (2 * sos.size() + 1 - std::min(trailing_b, trailing_a));
  padlen = std::min(padlen, n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * padlen);
  for (std::size_t i = padlen; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= padlen; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const auto zi = step_states(sos);
  std::vector<double> y = run_cascade(sos, ext, scaled(zi, ext.front()));
  std::reverse(y.begin(), y.end());
  y = run_cascade(sos, y, scaled(zi, y.front()));
  std::reverse(y.begin(), y.end());
  return {y.begin() + static_cast<std::ptrdiff_t>(padlen), y.begin() + static_cast<std::ptrdiff_t>(padlen + n)};
}

double magnitude_response(const SosFilter& sos, double f_hz, double rate_hz) {
  const cplx zinv = std::exp(cplx(0.0, -2.0 * std::numbers::pi * f_hz / rate_hz));
  cplx h(1.0, 0.0);
  for (const auto& q : sos) {
    h *= (q.b0 + q.b1 * zinv + q.b2 * zinv * zinv) / (1.0 + q.a1 * zinv + q.a2 * zinv * zinv);
  }
  return std::abs(h);
}

TimeSeries apply_filter(const TimeSeries& ts, const FilterSpec& spec) {
  const SosFilter sos = design_butterworth(spec, ts.rate_hz);
  TimeSeries out = ts;
  out.samples = spec.zero_phase ? sos_filtfilt(sos, ts.samples) : sos_filter(sos, ts.samples);
  return out;
}

}  // namespace fogkit
