#pragma once

// Quantum statistics of the cavity field carried by Psi(q, x).
//
// Ladder operators are defined relative to a reference frequency w_ref:
// a = sqrt(w_ref/2) (x + i p / w_ref). The field quadratures are
// x_hat = a + a^dag = sqrt(2 w_ref) x and y_hat = -i(a - a^dag) = sqrt(2/w_ref) p,
// so the vacuum of frequency w_ref has unit variance in both.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vibpol/grid.hpp"
#include "vibpol/hermite.hpp"

namespace vibpol {

enum class FockFrame {
  Instantaneous,  // w_ref = w_c(t)
  Static,         // w_ref = w_c0
};

inline std::string_view to_string(FockFrame f) {
  return f == FockFrame::Instantaneous ? "instantaneous" : "static";
}

inline FockFrame parse_fock_frame(std::string_view s) {
  if (s == "instantaneous") return FockFrame::Instantaneous;
  if (s == "static") return FockFrame::Static;
  throw std::invalid_argument("unknown fock_frame '" + std::string(s) +
                              "' (expected instantaneous|static)");
}

struct FockBasisSpec {
  double omega_ref = 0.0;  // hartree
  std::size_t n_max = 60;
  FockFrame frame = FockFrame::Instantaneous;
};

/// Capture below this is flagged (statistics are still reported).
inline constexpr double kMinCapture = 0.999;

/// Sentinel stored in FieldStatistics::mandel_q when <n> is too small for Q
/// to be defined (vacuum-like fields).
inline constexpr double kUndefinedQ = std::numeric_limits<double>::quiet_NaN();

/// P(n) = sum_q dq |int dx chi_n(x) psi(q, x)|^2 for n = 0..n_max.
inline std::vector<double> photon_distribution(const Wavefunction2D& psi, const FockBasisSpec& spec) {
  const auto& xg = psi.x_grid();
  const auto chi = hermite_functions(xg, spec.omega_ref, spec.n_max);
  const std::size_t nq = psi.nq(), nx = psi.nx();
  const double dx = xg.spacing();
  const double dq = psi.q_grid().spacing();
  std::vector<double> p(spec.n_max + 1, 0.0);
  for (std::size_t iq = 0; iq < nq; ++iq) {
    const cplx* row = psi.raw() + iq * nx;
    for (std::size_t n = 0; n <= spec.n_max; ++n) {
      const auto& c = chi[n];
      double re = 0.0, im = 0.0;
      for (std::size_t ix = 0; ix < nx; ++ix) {
        re += c[ix] * row[ix].real();
        im += c[ix] * row[ix].imag();
      }
      p[n] += (re * re + im * im) * dx * dx * dq;
    }
  }
  return p;
}

struct NumberMoments {
  double capture = 0.0;  // sum P(n)
  double mean = 0.0;
  double variance = 0.0;
};

/// Moments of P(n); the distribution is renormalized by its captured weight.
inline NumberMoments number_moments(const std::vector<double>& p) {
  NumberMoments m;
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const auto nn = static_cast<double>(n);
    m.capture += p[n];
    s1 += nn * p[n];
    s2 += nn * nn * p[n];
  }
  if (m.capture > 0.0) {
    m.mean = s1 / m.capture;
    m.variance = std::max(0.0, s2 / m.capture - m.mean * m.mean);
  }
  return m;
}

/// (var_n - <n>) / <n>; empty when <n> < 1e-12.
inline std::optional<double> mandel_q(const std::vector<double>& p) {
  const auto m = number_moments(p);
  if (m.mean < 1e-12) return std::nullopt;
  return (m.variance - m.mean) / m.mean;
}

/// Vacuum-normalized quadrature (co)variances.
struct QuadratureMoments {
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;  // <(x y + y x)/2> - <x><y>
  double mean_x = 0.0;
  double mean_y = 0.0;
  // Raw moments in the x coordinate, reused by moments_crosscheck.
  double x2 = 0.0;
  double p2 = 0.0;

  /// <Delta X_theta^2> for X_theta = cos(theta) x + sin(theta) y.
  double variance(double theta) const {
    const double c = std::cos(theta), s = std::sin(theta);
    return c * c * var_x + s * s * var_y + 2.0 * s * c * cov;
  }
};

inline QuadratureMoments quadrature_moments(const Wavefunction2D& psi, double omega_ref,
                                            const FourierTransform2D& fft) {
  const auto& xg = psi.x_grid();
  const std::size_t nq = psi.nq(), nx = psi.nx();
  const auto xs = xg.points();
  const auto ppsi = apply_momentum(psi, Axis::X, fft);
  double mx = 0.0, mx2 = 0.0;
  double mp = 0.0, mp2 = 0.0, sym = 0.0;
  for (std::size_t iq = 0; iq < nq; ++iq)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const cplx a = psi(iq, ix);
      const cplx b = ppsi(iq, ix);
      const double x = xs[ix];
      const double w = std::norm(a);
      mx += w * x;
      mx2 += w * x * x;
      const cplx apb = std::conj(a) * b;  // psi* (p psi)
      mp += apb.real();
      mp2 += std::norm(b);
      sym += x * apb.real();  // Re <psi| x p |psi> = <(xp + px)/2>
    }
  const double cell = psi.cell();
  mx *= cell;
  mx2 *= cell;
  mp *= cell;
  mp2 *= cell;
  sym *= cell;
  QuadratureMoments q;
  const double sx = std::sqrt(2.0 * omega_ref);
  const double sy = std::sqrt(2.0 / omega_ref);
  q.mean_x = sx * mx;
  q.mean_y = sy * mp;
  q.var_x = sx * sx * (mx2 - mx * mx);
  q.var_y = sy * sy * (mp2 - mp * mp);
  q.cov = sx * sy * (sym - mx * mp);
  q.x2 = mx2;
  q.p2 = mp2;
  return q;
}

inline double quadrature_variance(const Wavefunction2D& psi, double theta, const FockBasisSpec& spec) {
  FourierTransform2D fft(psi);
  return quadrature_moments(psi, spec.omega_ref, fft).variance(theta);
}

/// zeta = -10 log10(variance); positive means squeezed below vacuum.
inline double squeezing_db(double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("squeezing_db: variance must be positive, got " + std::to_string(variance));
  }
  return -10.0 * std::log10(variance);
}

/// |<psi_t|psi_0>|^2.
inline double autocorrelation(const Wavefunction2D& psi_t, const Wavefunction2D& psi_0) {
  return std::norm(inner_product(psi_t, psi_0));
}

struct MomentsCrosscheck {
  double from_distribution = 0.0;
  double from_moments = 0.0;
  double difference = 0.0;
};

/// Compares <n> from P(n) with (w <x^2> + <p^2>/w - 1)/2.
inline MomentsCrosscheck moments_crosscheck(const std::vector<double>& p, const QuadratureMoments& q,
                                            double omega_ref) {
  MomentsCrosscheck c;
  double s = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) s += static_cast<double>(n) * p[n];
  c.from_distribution = s;
  c.from_moments = 0.5 * (omega_ref * q.x2 + q.p2 / omega_ref - 1.0);
  c.difference = std::abs(c.from_distribution - c.from_moments);
  return c;
}

inline MomentsCrosscheck moments_crosscheck(const Wavefunction2D& psi, const FockBasisSpec& spec) {
  FourierTransform2D fft(psi);
  return moments_crosscheck(photon_distribution(psi, spec), quadrature_moments(psi, spec.omega_ref, fft),
                            spec.omega_ref);
}

struct FieldStatistics {
  double t = 0.0;  // fs
  double omega_c_t = 0.0;
  double omega_ref = 0.0;
  double mean_n = 0.0;
  double var_n = 0.0;
  double mandel_q = kUndefinedQ;
  std::vector<double> p_of_n;
  double var_x = 0.0;
  double var_y = 0.0;
  double cov_xy = 0.0;
  double zeta_0 = 0.0;
  double zeta_half_pi = 0.0;
  double autocorr = 1.0;
  double capture = 0.0;
  double crosscheck = 0.0;  // |<n>_P - <n>_moments|

  bool q_defined() const { return std::isfinite(mandel_q); }
  bool captured() const { return capture >= kMinCapture; }
  double heisenberg_product() const { return var_x * var_y; }
};

/// All statistics for one snapshot. `omega_c_t` is the instantaneous cavity
/// frequency; the frame in `spec` decides whether it is also the reference.
inline FieldStatistics field_statistics(double t_fs, double omega_c_t, const Wavefunction2D& psi,
                                        const Wavefunction2D& psi_0, FockBasisSpec spec,
                                        double omega_c0, const FourierTransform2D& fft) {
  spec.omega_ref = spec.frame == FockFrame::Instantaneous ? omega_c_t : omega_c0;
  FieldStatistics s;
  s.t = t_fs;
  s.omega_c_t = omega_c_t;
  s.omega_ref = spec.omega_ref;
  s.p_of_n = photon_distribution(psi, spec);
  const auto nm = number_moments(s.p_of_n);
  s.capture = nm.capture;
  s.mean_n = nm.mean;
  s.var_n = nm.variance;
  if (const auto q = mandel_q(s.p_of_n)) s.mandel_q = *q;
  const auto qm = quadrature_moments(psi, spec.omega_ref, fft);
  s.var_x = qm.var_x;
  s.var_y = qm.var_y;
  s.cov_xy = qm.cov;
  s.zeta_0 = squeezing_db(qm.var_x);
  s.zeta_half_pi = squeezing_db(qm.var_y);
  s.autocorr = autocorrelation(psi, psi_0);
  s.crosscheck = moments_crosscheck(s.p_of_n, qm, spec.omega_ref).difference;
  return s;
}

}  // namespace vibpol
