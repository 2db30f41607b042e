#pragma once

// Time-dependent vibration-cavity Hamiltonian in coordinate space:
//
//   H(t) = T_q + V(q) - (1/2) d^2/dx^2 + (1/2) w_c(t)^2 x^2
//          + sqrt(2 w_c(t)) E0(t) d(q) x
//
// with the Gaussian frequency protocol
//
//   w_c(t) = w_c0 (1 + eta exp(-(t - t_d)^2 / 2 tau^2))
//
// and E0(t) = lambda_g w_c(t) / d10. Time arguments are in femtoseconds at
// this interface; all energies are hartree.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vibpol/molecule.hpp"
#include "vibpol/units.hpp"

namespace vibpol {

struct CavityModulation {
  double omega_c0 = 0.0;  // undriven cavity frequency, hartree
  double eta = 0.0;       // peak fractional shift; > 0 blue, < 0 red
  double t_d = 250.0;     // pulse centre, fs
  double tau = 62.5;      // Gaussian width parameter, fs

  double fwhm() const { return 2.0 * std::sqrt(2.0 * std::numbers::ln2) * tau; }

  /// Spectral bandwidth 2 sqrt(2 ln 2) / tau, hartree.
  double bandwidth() const {
    return 2.0 * std::sqrt(2.0 * std::numbers::ln2) / units::fs_to_au(tau);
  }

  /// Instant after which the envelope is below exp(-8).
  double pulse_off_time() const { return t_d + 4.0 * tau; }

  void validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("CavityModulation: tau must be positive");
    if (!(1.0 + eta > 0.0)) throw std::invalid_argument("CavityModulation: 1 + eta must be positive");
    if (!(omega_c0 > 0.0)) throw std::invalid_argument("CavityModulation: omega_c0 must be positive");
  }
};

/// How the vacuum-field amplitude follows the cavity frequency.
enum class VacuumField {
  Tracking,  // E0(t) = lambda_g w_c(t) / d10
  Frozen,    // E0 = lambda_g w_c0 / d10 for all t
};

inline std::string_view to_string(VacuumField v) {
  return v == VacuumField::Tracking ? "tracking" : "frozen";
}

inline VacuumField parse_vacuum_field(std::string_view s) {
  if (s == "tracking") return VacuumField::Tracking;
  if (s == "frozen") return VacuumField::Frozen;
  throw std::invalid_argument("unknown vacuum_field '" + std::string(s) +
                              "' (expected tracking|frozen)");
}

struct CouplingSpec {
  double lambda_g = 0.0;
  double d10 = 1.0;  // <1|d|0>, atomic units
  VacuumField field = VacuumField::Tracking;

  bool is_strong() const { return lambda_g >= 0.01; }
  bool is_ultrastrong() const { return lambda_g >= 0.1; }

  void validate() const {
    if (!(lambda_g >= 0.0)) throw std::invalid_argument("CouplingSpec: lambda_g must be >= 0");
    if (!(d10 > 0.0)) throw std::invalid_argument("CouplingSpec: d10 must be positive");
  }
};

inline double cavity_frequency(double t_fs, const CavityModulation& m) {
  const double s = (t_fs - m.t_d) / m.tau;
  return m.omega_c0 * (1.0 + m.eta * std::exp(-0.5 * s * s));
}

inline double vacuum_amplitude(double t_fs, const CouplingSpec& c, const CavityModulation& m) {
  const double w = c.field == VacuumField::Tracking ? cavity_frequency(t_fs, m) : m.omega_c0;
  return c.lambda_g * w / c.d10;
}

/// Full model; the molecular part is fixed, the cavity part is time dependent.
struct CavityModel {
  Potential potential;
  DipoleParams dipole;
  CavityModulation modulation;
  CouplingSpec coupling;

  void validate() const {
    vibpol::validate(potential);
    dipole.validate();
    modulation.validate();
    coupling.validate();
  }

  double mass_q() const { return reduced_mass(potential); }

  /// Coefficients of the t-dependent part of the diagonal potential:
  /// V = V(q) + quad * x^2 + lin * d(q) x.
  struct Coefficients {
    double omega = 0.0;
    double quad = 0.0;
    double lin = 0.0;
  };

  Coefficients coefficients(double t_fs) const {
    const double w = cavity_frequency(t_fs, modulation);
    return {w, 0.5 * w * w, std::sqrt(2.0 * w) * vacuum_amplitude(t_fs, coupling, modulation)};
  }

  /// Undriven coefficients (exactly w_c0), used for eigenstate preparation.
  Coefficients static_coefficients() const {
    const double w = modulation.omega_c0;
    return {w, 0.5 * w * w, std::sqrt(2.0 * w) * coupling.lambda_g * w / coupling.d10};
  }
};

inline double potential_surface(double q, double x, const CavityModel::Coefficients& c,
                                const CavityModel& model) {
  return potential_energy(q, model.potential) + c.quad * x * x +
         c.lin * dipole_moment(q, model.dipole) * x;
}

inline double potential_surface(double q, double x, double t_fs, const CavityModel& model) {
  return potential_surface(q, x, model.coefficients(t_fs), model);
}

}  // namespace vibpol
