#pragma once

// Brute-force reference in a truncated product basis of bare vibrational
// eigenstates |v> and cavity Fock states |n>. The Hamiltonian is written in
// second-quantized form, independent of the coordinate-grid propagator, and
// propagated by exact exponentiation of the midpoint Hamiltonian.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "vibpol/cavity.hpp"
#include "vibpol/field_stats.hpp"
#include "vibpol/grid.hpp"
#include "vibpol/hermite.hpp"
#include "vibpol/molecule.hpp"
#include "vibpol/units.hpp"

namespace vibpol::oracle {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct ProductBasis {
  int n_vib = 10;
  int n_fock = 20;
  double omega_ref = 0.0;   // Fock-state frequency (w_c0)
  VibrationalStates states;  // bare levels on the q grid
  Matrix dipole;             // <v|d|w>

  int dimension() const { return n_vib * n_fock; }
  int index(int v, int n) const { return v * n_fock + n; }
};

inline ProductBasis make_basis(const Potential& pot, const DipoleParams& dip, const Grid1D& q,
                               int n_vib, int n_fock, double omega_ref) {
  if (n_vib < 2 || n_fock < 2) throw std::invalid_argument("make_basis: need at least 2x2 states");
  ProductBasis b;
  b.n_vib = n_vib;
  b.n_fock = n_fock;
  b.omega_ref = omega_ref;
  b.states = vibrational_eigenstates(pot, q, n_vib);
  b.dipole = dipole_matrix(b.states, dip);
  return b;
}

/// Representation used for the cavity mode.
enum class Representation {
  Static,         // Fock states of basis.omega_ref; valid for propagation
  Instantaneous,  // Fock states of w_c(t): cavity term w_c(t)(a^dag a + 1/2)
};

/// Hamiltonian for explicit diagonal coefficients.
inline Matrix build_hamiltonian_from(const ProductBasis& b, const CavityModel::Coefficients& c,
                                     Representation rep) {
  const int nf = b.n_fock;
  const int dim = b.dimension();
  const double wr = rep == Representation::Static ? b.omega_ref : c.omega;
  Matrix cav = Matrix::Zero(nf, nf);
  if (rep == Representation::Static) {
    // 1/2 p^2 + quad x^2 with x^2, p^2 expanded in a, a^dag of frequency wr.
    for (int n = 0; n < nf; ++n) {
      const double dn = 2.0 * n + 1.0;
      cav(n, n) = 0.25 * wr * dn + c.quad * dn / (2.0 * wr);
      if (n + 2 < nf) {
        const double s = std::sqrt((n + 1.0) * (n + 2.0));
        const double v = -0.25 * wr * s + c.quad * s / (2.0 * wr);
        cav(n + 2, n) = v;
        cav(n, n + 2) = v;
      }
    }
  } else {
    for (int n = 0; n < nf; ++n) cav(n, n) = c.omega * (n + 0.5);
  }
  Matrix xop = Matrix::Zero(nf, nf);
  for (int n = 0; n + 1 < nf; ++n) {
    const double v = std::sqrt((n + 1.0) / (2.0 * wr));
    xop(n + 1, n) = v;
    xop(n, n + 1) = v;
  }
  Matrix h = Matrix::Zero(dim, dim);
  for (int v = 0; v < b.n_vib; ++v) {
    h.block(v * nf, v * nf, nf, nf) += cav;
    for (int n = 0; n < nf; ++n) h(b.index(v, n), b.index(v, n)) += b.states.energies[static_cast<std::size_t>(v)];
    for (int w = 0; w < b.n_vib; ++w) {
      const double dvw = b.dipole(v, w);
      if (dvw == 0.0) continue;
      h.block(v * nf, w * nf, nf, nf) += c.lin * dvw * xop;
    }
  }
  return h;
}

/// Hamiltonian at time t (fs). In the static representation the cavity part
/// is p^2/2 + w_c(t)^2 x^2 / 2 with exact (untruncated) matrix elements of x^2
/// and p^2; the coupling is sqrt(2 w_c) E0 d(q) x.
inline Matrix build_hamiltonian(const ProductBasis& b, const CavityModel& model, double t_fs,
                                Representation rep = Representation::Static) {
  const auto c = model.coefficients(t_fs);
  return build_hamiltonian_from(b, c, rep);
}

struct EigenPairs {
  Eigen::VectorXd values;
  Matrix vectors;
};

/// Lowest k eigenpairs, ascending.
inline EigenPairs eigensolve(const Matrix& h, int k) {
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, h.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("eigensolve: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolve: diagonalization failed");
  k = std::min<int>(k, static_cast<int>(h.rows()));
  return {solver.eigenvalues().head(k), solver.eigenvectors().leftCols(k)};
}

/// Static-frame eigenpairs of the undriven Hamiltonian.
inline EigenPairs static_spectrum(const ProductBasis& b, const CavityModel& model, int k) {
  return eigensolve(build_hamiltonian_from(b, model.static_coefficients(), Representation::Static), k);
}

/// Steps psi from t0 to t0 + n dt (fs for times, atomic units for dt) with
/// exp(-i H(t_mid) dt). The observer sees (t_fs, psi) after every step.
inline CVector propagate_dense(CVector psi, const ProductBasis& b, const CavityModel& model,
                               double t0_fs, std::size_t n, double dt,
                               const std::function<void(double, const CVector&)>& observer = {}) {
  for (std::size_t k = 0; k < n; ++k) {
    const double t_mid = t0_fs + units::au_to_fs((static_cast<double>(k) + 0.5) * dt);
    const Matrix h = build_hamiltonian(b, model, t_mid);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
    const Matrix& v = solver.eigenvectors();
    CVector coeff = v.transpose() * psi;
    for (Eigen::Index i = 0; i < coeff.size(); ++i)
      coeff(i) *= std::polar(1.0, -solver.eigenvalues()(i) * dt);
    psi = v * coeff;
    if (observer) observer(t0_fs + units::au_to_fs(static_cast<double>(k + 1) * dt), psi);
  }
  return psi;
}

/// Photon-number distribution and quadrature moments of a basis state in
/// the static (omega_ref) Fock frame.
struct DenseFieldStats {
  std::vector<double> p_of_n;
  double mean_n = 0.0, var_n = 0.0;
  std::optional<double> mandel_q;
  double var_x = 0.0, var_y = 0.0;
};

inline DenseFieldStats field_statistics(const CVector& psi, const ProductBasis& b) {
  const int nf = b.n_fock;
  DenseFieldStats s;
  s.p_of_n.assign(static_cast<std::size_t>(nf), 0.0);
  for (int v = 0; v < b.n_vib; ++v)
    for (int n = 0; n < nf; ++n) s.p_of_n[static_cast<std::size_t>(n)] += std::norm(psi(b.index(v, n)));
  const auto m = number_moments(s.p_of_n);
  s.mean_n = m.mean;
  s.var_n = m.variance;
  s.mandel_q = mandel_q(s.p_of_n);
  // <a>, <a^2>, <a^dag a> summed over the vibrational index.
  cplx ea{0.0, 0.0}, ea2{0.0, 0.0};
  double ena = 0.0;
  for (int v = 0; v < b.n_vib; ++v)
    for (int n = 0; n < nf; ++n) {
      const cplx c = psi(b.index(v, n));
      ena += n * std::norm(c);
      if (n + 1 < nf) ea += std::conj(c) * std::sqrt(n + 1.0) * psi(b.index(v, n + 1));
      if (n + 2 < nf) ea2 += std::conj(c) * std::sqrt((n + 1.0) * (n + 2.0)) * psi(b.index(v, n + 2));
    }
  // x = a + a^dag, y = -i(a - a^dag).
  const double ex = 2.0 * ea.real();
  const double ey = 2.0 * ea.imag();
  const double ex2 = 2.0 * ea2.real() + 2.0 * ena + 1.0;
  const double ey2 = -2.0 * ea2.real() + 2.0 * ena + 1.0;
  s.var_x = ex2 - ex * ex;
  s.var_y = ey2 - ey * ey;
  return s;
}

/// Maps a basis state onto the coordinate grid: sum c_vn phi_v(q) chi_n(x).
inline Wavefunction2D to_grid(const CVector& psi, const ProductBasis& b, const Grid1D& x) {
  const Grid1D& q = b.states.grid;
  Wavefunction2D out(q, x);
  const auto chi = hermite_functions(x, b.omega_ref, static_cast<std::size_t>(b.n_fock - 1));
  // f_v(x) = sum_n c_vn chi_n(x), then psi(q, x) = sum_v phi_v(q) f_v(x).
  for (int v = 0; v < b.n_vib; ++v) {
    std::vector<cplx> f(x.n, cplx{0.0, 0.0});
    for (int n = 0; n < b.n_fock; ++n) {
      const cplx c = psi(b.index(v, n));
      if (c == cplx{0.0, 0.0}) continue;
      for (std::size_t ix = 0; ix < x.n; ++ix) f[ix] += c * chi[static_cast<std::size_t>(n)][ix];
    }
    const auto phi = b.states.column(static_cast<std::size_t>(v));
    for (std::size_t iq = 0; iq < q.n; ++iq)
      for (std::size_t ix = 0; ix < x.n; ++ix) out(iq, ix) += phi[iq] * f[ix];
  }
  return out;
}

struct ConvergenceReport {
  bool converged = false;
  double max_shift_cm = 0.0;  // lowest three levels, cm^-1
};

/// Enlarges both truncations by 50% and compares the lowest three levels.
inline ConvergenceReport check_convergence(const Potential& pot, const DipoleParams& dip,
                                           const Grid1D& q, const CavityModel& model, int n_vib,
                                           int n_fock, double threshold_cm = 0.5) {
  const auto small = make_basis(pot, dip, q, n_vib, n_fock, model.modulation.omega_c0);
  const int nv_big = std::min(n_vib + (n_vib + 1) / 2, std::visit([](const auto& p) {
    if constexpr (std::is_same_v<std::decay_t<decltype(p)>, MorseParams>) return p.bound_state_count();
    else return 1000;
  }, pot));
  const auto big = make_basis(pot, dip, q, nv_big, n_fock + (n_fock + 1) / 2, model.modulation.omega_c0);
  const auto a = static_spectrum(small, model, 3);
  const auto bb = static_spectrum(big, model, 3);
  ConvergenceReport r;
  r.max_shift_cm = units::hartree_to_wavenumber((a.values - bb.values).cwiseAbs().maxCoeff());
  r.converged = r.max_shift_cm < threshold_cm;
  return r;
}

}  // namespace vibpol::oracle
