#pragma once

// Physical constants and unit conversions.
//
// Everything inside the library runs in Hartree atomic units
// (hbar = m_e = e = a_0 = 1). Configs and reports use spectroscopic units.
//
// Constants are the CODATA 2018 recommended values
// (E. Tiesinga et al., Rev. Mod. Phys. 93, 025010 (2021);
//  https://physics.nist.gov/cuu/Constants/).

#include <stdexcept>
#include <string>
#include <string_view>

namespace vibpol::units {

inline constexpr double kHartreeInEv = 27.211386245988;          // eV
inline constexpr double kHartreeInWavenumber = 219474.6313632;   // cm^-1
inline constexpr double kAtomicTimeInFs = 2.4188843265857e-2;    // fs
inline constexpr double kDaltonInElectronMass = 1822.888486209;  // m_e
inline constexpr double kBohrInAngstrom = 0.529177210903;        // angstrom
// e*a0 = 8.4783536255e-30 C m, 1 D = 1e-21/c C m = 3.33564095198e-30 C m.
inline constexpr double kDebyeInAtomicDipole = 0.393430238;      // e*a0

enum class Dimension { Energy, Time, Mass, Dipole, Length };

enum class Unit {
  Hartree,
  ElectronVolt,
  Wavenumber,
  AtomicTime,
  Femtosecond,
  ElectronMass,
  Dalton,
  AtomicDipole,
  Debye,
  Bohr,
  Angstrom,
};

constexpr Dimension dimension_of(Unit u) noexcept {
  switch (u) {
    case Unit::Hartree:
    case Unit::ElectronVolt:
    case Unit::Wavenumber:
      return Dimension::Energy;
    case Unit::AtomicTime:
    case Unit::Femtosecond:
      return Dimension::Time;
    case Unit::ElectronMass:
    case Unit::Dalton:
      return Dimension::Mass;
    case Unit::AtomicDipole:
    case Unit::Debye:
      return Dimension::Dipole;
    case Unit::Bohr:
    case Unit::Angstrom:
      return Dimension::Length;
  }
  return Dimension::Energy;
}

// Size of one `u` expressed in the atomic unit of its dimension.
constexpr double atomic_value_of(Unit u) noexcept {
  switch (u) {
    case Unit::Hartree: return 1.0;
    case Unit::ElectronVolt: return 1.0 / kHartreeInEv;
    case Unit::Wavenumber: return 1.0 / kHartreeInWavenumber;
    case Unit::AtomicTime: return 1.0;
    case Unit::Femtosecond: return 1.0 / kAtomicTimeInFs;
    case Unit::ElectronMass: return 1.0;
    case Unit::Dalton: return kDaltonInElectronMass;
    case Unit::AtomicDipole: return 1.0;
    case Unit::Debye: return kDebyeInAtomicDipole;
    case Unit::Bohr: return 1.0;
    case Unit::Angstrom: return 1.0 / kBohrInAngstrom;
  }
  return 1.0;
}

inline std::string_view name_of(Unit u) noexcept {
  switch (u) {
    case Unit::Hartree: return "hartree";
    case Unit::ElectronVolt: return "eV";
    case Unit::Wavenumber: return "cm^-1";
    case Unit::AtomicTime: return "au_time";
    case Unit::Femtosecond: return "fs";
    case Unit::ElectronMass: return "m_e";
    case Unit::Dalton: return "amu";
    case Unit::AtomicDipole: return "au_dipole";
    case Unit::Debye: return "debye";
    case Unit::Bohr: return "bohr";
    case Unit::Angstrom: return "angstrom";
  }
  return "?";
}

/// Converts `value` from unit `from` to unit `to`.
/// Throws std::invalid_argument if the two units measure different dimensions.
inline double convert(double value, Unit from, Unit to) {
  if (dimension_of(from) != dimension_of(to)) {
    throw std::invalid_argument("units::convert: cannot convert " +
                                std::string(name_of(from)) + " to " +
                                std::string(name_of(to)) +
                                " (incompatible dimensions)");
  }
  if (from == to) return value;
  return value * (atomic_value_of(from) / atomic_value_of(to));
}

// Shorthands used throughout the code base.
inline double ev_to_hartree(double ev) { return ev / kHartreeInEv; }
inline double hartree_to_wavenumber(double e) { return e * kHartreeInWavenumber; }
inline double wavenumber_to_hartree(double k) { return k / kHartreeInWavenumber; }
inline double fs_to_au(double t) { return t / kAtomicTimeInFs; }
inline double au_to_fs(double t) { return t * kAtomicTimeInFs; }
inline double dalton_to_au(double m) { return m * kDaltonInElectronMass; }
inline double debye_to_au(double d) { return d * kDebyeInAtomicDipole; }

}  // namespace vibpol::units
