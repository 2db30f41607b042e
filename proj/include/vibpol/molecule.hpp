#pragma once

// Molecular vibration model: Morse and harmonic potentials, the dipole
// function d(q) = d0 (q - q0) exp(-(q - q1)^2 / 2 sigma^2), analytic Morse
// levels and a 1D grid eigensolver.
//
// Kinetic energy along q is -(1/2 mu) d^2/dq^2 with mu in electron masses
// and q in bohr.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vibpol/grid.hpp"
#include "vibpol/units.hpp"

namespace vibpol {

struct MorseParams {
  double De = 0.0;     // dissociation energy, hartree
  double alpha = 0.0;  // 1/bohr
  double q_eq = 0.0;   // bohr
  double mu = 0.0;     // reduced mass, electron masses

  double harmonic_frequency() const { return alpha * std::sqrt(2.0 * De / mu); }
  double anharmonicity() const { return alpha * alpha / (2.0 * mu); }

  // Number of bound levels v = 0 .. count-1.
  int bound_state_count() const {
    return static_cast<int>(std::floor(std::sqrt(2.0 * mu * De) / alpha - 0.5)) + 1;
  }

  void validate() const {
    if (!(De > 0.0) || !(alpha > 0.0) || !(mu > 0.0)) {
      throw std::invalid_argument("MorseParams: De, alpha and mu must be positive");
    }
    if (bound_state_count() < 3) {
      throw std::invalid_argument("MorseParams: potential supports fewer than 3 bound states");
    }
  }
};

struct HarmonicParams {
  double omega = 0.0;  // hartree
  double q_eq = 0.0;   // bohr
  double mu = 0.0;     // electron masses

  void validate() const {
    if (!(omega > 0.0) || !(mu > 0.0)) {
      throw std::invalid_argument("HarmonicParams: omega and mu must be positive");
    }
  }
};

using Potential = std::variant<MorseParams, HarmonicParams>;

struct DipoleParams {
  double d0 = 0.0;     // atomic units of dipole per bohr
  double q0 = 0.0;     // zero crossing, bohr
  double q1 = 0.0;     // Gaussian centre, bohr
  double sigma = 1.0;  // Gaussian width, bohr

  void validate() const {
    if (!(sigma > 0.0)) throw std::invalid_argument("DipoleParams: sigma must be positive");
  }
};

inline double reduced_mass(const Potential& p) {
  return std::visit([](const auto& v) { return v.mu; }, p);
}

inline double equilibrium(const Potential& p) {
  return std::visit([](const auto& v) { return v.q_eq; }, p);
}

inline void validate(const Potential& p) {
  std::visit([](const auto& v) { v.validate(); }, p);
}

/// V(q) in hartree. Morse: De (1 - e^{-a(q-qe)})^2 - De. Harmonic: measured
/// from its own minimum (no -De offset).
inline double potential_energy(double q, const Potential& p) {
  if (const auto* m = std::get_if<MorseParams>(&p)) {
    const double e = 1.0 - std::exp(-m->alpha * (q - m->q_eq));
    return m->De * e * e - m->De;
  }
  const auto& h = std::get<HarmonicParams>(p);
  const double dq = q - h.q_eq;
  return 0.5 * h.mu * h.omega * h.omega * dq * dq;
}

inline double dipole_moment(double q, const DipoleParams& d) {
  const double g = (q - d.q1) / d.sigma;
  return d.d0 * (q - d.q0) * std::exp(-0.5 * g * g);
}

/// Analytic Morse level E_v = we (v+1/2) - chi (v+1/2)^2 - De.
inline double morse_level(int v, const MorseParams& p) {
  if (v < 0 || v >= p.bound_state_count()) {
    throw std::out_of_range("morse_level: v = " + std::to_string(v) +
                            " is beyond the bound spectrum (" +
                            std::to_string(p.bound_state_count()) + " levels)");
  }
  const double h = v + 0.5;
  return p.harmonic_frequency() * h - p.anharmonicity() * h * h - p.De;
}

/// Anharmonic shift (E1 - E0) - (E2 - E1) = 2 chi for a Morse oscillator.
inline double anharmonic_shift(const MorseParams& p) {
  return (morse_level(1, p) - morse_level(0, p)) - (morse_level(2, p) - morse_level(1, p));
}

namespace presets {

// The Morse presets were tabulated with 1 hartree = 27.2 eV; converting the
// listed De with this factor reproduces the 1838.26 cm^-1 fundamental of V_A.
// CODATA (27.2114 eV) would give 1837.87 cm^-1.
inline constexpr double kTabulatedEvPerHartree = 27.2;
inline constexpr double kReducedMassDalton = 8.5;
inline constexpr double kEquilibrium = 4.0;

inline double reduced_mass_au() { return units::dalton_to_au(kReducedMassDalton); }

inline MorseParams morse_a() {
  return {6.80 / kTabulatedEvPerHartree, 1.50, kEquilibrium, reduced_mass_au()};
}

inline MorseParams morse_b() {
  return {9.80 / kTabulatedEvPerHartree, 1.25, kEquilibrium, reduced_mass_au()};
}

/// Harmonic V_C with the V_A fundamental.
inline HarmonicParams harmonic_c() {
  const auto a = morse_a();
  return {morse_level(1, a) - morse_level(0, a), kEquilibrium, reduced_mass_au()};
}

inline DipoleParams non_polar() { return {units::debye_to_au(5.08), 4.0, 4.0, 0.6}; }
inline DipoleParams polar_right() { return {units::debye_to_au(2.54), 2.7, 4.5, 0.6}; }

inline Potential potential(std::string_view name) {
  if (name == "VA") return morse_a();
  if (name == "VB") return morse_b();
  if (name == "VC") return harmonic_c();
  throw std::invalid_argument("unknown potential preset '" + std::string(name) + "'");
}

inline DipoleParams dipole(std::string_view name) {
  if (name == "PR") return polar_right();
  if (name == "NP") return non_polar();
  throw std::invalid_argument("unknown dipole preset '" + std::string(name) + "'");
}

}  // namespace presets

/// Real function sampled on a 1D grid.
struct GridFunction {
  Grid1D grid;
  std::vector<double> values;
};

struct VibrationalStates {
  Grid1D grid;
  std::vector<double> energies;  // ascending, hartree
  Eigen::MatrixXd vectors;       // column v: amplitudes with sum |phi|^2 dq = 1

  std::size_t count() const { return energies.size(); }
  GridFunction state(std::size_t v) const {
    GridFunction f{grid, std::vector<double>(grid.n)};
    for (std::size_t i = 0; i < grid.n; ++i) f.values[i] = vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(v));
    return f;
  }
  std::span<const double> column(std::size_t v) const {
    return {vectors.data() + v * grid.n, grid.n};
  }
};

/// Sinc-DVR (Colbert-Miller) kinetic matrix on a uniform grid.
inline Eigen::MatrixXd sinc_dvr_kinetic(const Grid1D& grid, double mass) {
  const auto n = static_cast<Eigen::Index>(grid.n);
  const double dq = grid.spacing();
  const double pref = 1.0 / (2.0 * mass * dq * dq);
  Eigen::MatrixXd t(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    t(i, i) = pref * std::numbers::pi * std::numbers::pi / 3.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      const auto d = static_cast<double>(i - j);
      const double v = pref * 2.0 * ((i - j) % 2 == 0 ? 1.0 : -1.0) / (d * d);
      t(i, j) = v;
      t(j, i) = v;
    }
  }
  return t;
}

/// Lowest `n_states` eigenpairs of the 1D vibrational Hamiltonian by dense
/// diagonalization. Eigenvector signs are fixed so the first significant
/// amplitude is positive.
inline VibrationalStates vibrational_eigenstates(const Potential& kind, const Grid1D& grid,
                                                 int n_states) {
  grid.validate();
  validate(kind);
  if (n_states < 1 || static_cast<std::size_t>(n_states) > grid.n) {
    throw std::invalid_argument("vibrational_eigenstates: invalid state count");
  }
  if (const auto* m = std::get_if<MorseParams>(&kind); m && n_states > m->bound_state_count()) {
    throw std::invalid_argument("vibrational_eigenstates: requested more states than bound levels");
  }
  const double mass = reduced_mass(kind);
  Eigen::MatrixXd h = sinc_dvr_kinetic(grid, mass);
  for (std::size_t i = 0; i < grid.n; ++i) {
    h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += potential_energy(grid.point(i), kind);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("vibrational_eigenstates: diagonalization failed");
  }
  VibrationalStates out;
  out.grid = grid;
  out.vectors.resize(static_cast<Eigen::Index>(grid.n), n_states);
  const double inv_sqrt_dq = 1.0 / std::sqrt(grid.spacing());
  double worst_residual = 0.0;
  for (int v = 0; v < n_states; ++v) {
    Eigen::VectorXd c = solver.eigenvectors().col(v);
    const double e = solver.eigenvalues()(v);
    worst_residual = std::max(worst_residual, (h * c - e * c).norm());
    Eigen::Index first = 0;
    const double cmax = c.cwiseAbs().maxCoeff();
    while (std::abs(c(first)) < 1e-3 * cmax) ++first;
    if (c(first) < 0.0) c = -c;
    out.vectors.col(v) = c * inv_sqrt_dq;
    out.energies.push_back(e);
  }
  if (worst_residual > 1e-8) {
    throw std::runtime_error("vibrational_eigenstates: eigen-residual " +
                             std::to_string(worst_residual) + " exceeds 1e-8");
  }
  return out;
}

/// <bra| d(q) |ket> by trapezoid quadrature on the shared grid.
inline double transition_dipole(const GridFunction& bra, const GridFunction& ket,
                                const DipoleParams& d) {
  if (!(bra.grid == ket.grid)) throw std::invalid_argument("transition_dipole: grid mismatch");
  const auto& g = bra.grid;
  if (bra.values.size() != g.n || ket.values.size() != g.n) {
    throw std::invalid_argument("transition_dipole: state size does not match its grid");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < g.n; ++i) {
    const double w = (i == 0 || i + 1 == g.n) ? 0.5 : 1.0;
    s += w * bra.values[i] * dipole_moment(g.point(i), d) * ket.values[i];
  }
  return s * g.spacing();
}

/// Dipole matrix <v|d|w> over all retained states.
inline Eigen::MatrixXd dipole_matrix(const VibrationalStates& states, const DipoleParams& d) {
  const auto n = static_cast<Eigen::Index>(states.count());
  Eigen::MatrixXd m(n, n);
  std::vector<GridFunction> fs;
  for (std::size_t v = 0; v < states.count(); ++v) fs.push_back(states.state(v));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      m(i, j) = transition_dipole(fs[i], fs[j], d);
      m(j, i) = m(i, j);
    }
  return m;
}

/// Transition dipole d10 = <1|d|0> from the bare vibrational eigenstates.
inline double compute_d10(const Potential& kind, const DipoleParams& d, const Grid1D& grid) {
  const auto states = vibrational_eigenstates(kind, grid, 2);
  return transition_dipole(states.state(1), states.state(0), d);
}

}  // namespace vibpol
