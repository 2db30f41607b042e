#pragma once

// Scenario configuration: flat `key = value` text, one key per line, `#`
// starts a comment. Every key is optional; see README.md for the schema.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "vibpol/cavity.hpp"
#include "vibpol/field_stats.hpp"
#include "vibpol/grid.hpp"
#include "vibpol/molecule.hpp"
#include "vibpol/propagator.hpp"
#include "vibpol/units.hpp"

namespace vibpol {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline KeyValues parse_key_values(std::istream& in, const std::string& origin = "<config>") {
  KeyValues kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    if (kv.contains(key)) throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

struct Scenario {
  std::string name = "scenario";

  std::string potential = "VA";  // VA | VB | VC | morse | harmonic
  std::optional<double> morse_De_ev, morse_alpha, morse_q_eq, morse_mu_amu;
  std::optional<double> harmonic_omega_cm1, harmonic_q_eq, harmonic_mu_amu;

  std::string dipole = "PR";  // PR | NP | custom
  std::optional<double> dipole_d0_debye, dipole_q0, dipole_q1, dipole_sigma;

  double lambda_g = 0.2;
  double eta = 0.2;
  double t_d = 250.0;  // fs
  double tau = 62.5;   // fs
  std::optional<double> omega_c0_cm1;  // default: resonant with v=0 -> 1
  VacuumField vacuum_field = VacuumField::Tracking;
  TargetState initial_state = TargetState::Ground;

  Grid1D q_grid = default_q_grid();
  Grid1D x_grid = default_x_grid();

  double dt = 1.0;         // atomic time units
  double t_final = 800.0;  // fs
  double sample_fs = 1.0;  // fs between CSV rows
  double edge_tolerance = 1e-6;

  FockFrame fock_frame = FockFrame::Instantaneous;
  std::size_t fock_nmax = 60;

  double imag_dt = 2.0;  // atomic time units
  double imag_tol = 1e-10;
  PrepPolish prep_polish = PrepPolish::Hamiltonian;

  std::vector<double> spectrum_lambdas{0.0, 0.05, 0.08, 0.2};  // spectrum subcommand only

  int snapshot_every = 0;  // CSV rows between wavefunction dumps; 0 disables
  std::string output = "out";

  /// Pulse bandwidth 2 sqrt(2 ln 2) / tau in cm^-1.
  double bandwidth_cm1() const {
    return units::hartree_to_wavenumber(CavityModulation{1.0, eta, t_d, tau}.bandwidth());
  }

  int sample_stride() const {
    return std::max(1, static_cast<int>(std::lround(units::fs_to_au(sample_fs) / dt)));
  }

  Potential resolve_potential() const {
    if (potential == "VA" || potential == "VB" || potential == "morse") {
      MorseParams m = potential == "VB" ? presets::morse_b() : presets::morse_a();
      if (potential == "morse" && !(morse_De_ev && morse_alpha)) {
        throw ConfigError("potential = morse requires morse.De_ev and morse.alpha");
      }
      if (morse_De_ev) m.De = units::ev_to_hartree(*morse_De_ev);
      if (morse_alpha) m.alpha = *morse_alpha;
      if (morse_q_eq) m.q_eq = *morse_q_eq;
      if (morse_mu_amu) m.mu = units::dalton_to_au(*morse_mu_amu);
      m.validate();
      return m;
    }
    if (potential == "VC" || potential == "harmonic") {
      HarmonicParams h = presets::harmonic_c();
      if (potential == "harmonic" && !harmonic_omega_cm1) {
        throw ConfigError("potential = harmonic requires harmonic.omega_cm1");
      }
      if (harmonic_omega_cm1) h.omega = units::wavenumber_to_hartree(*harmonic_omega_cm1);
      if (harmonic_q_eq) h.q_eq = *harmonic_q_eq;
      if (harmonic_mu_amu) h.mu = units::dalton_to_au(*harmonic_mu_amu);
      h.validate();
      return h;
    }
    throw ConfigError("unknown potential '" + potential + "' (VA|VB|VC|morse|harmonic)");
  }

  DipoleParams resolve_dipole() const {
    DipoleParams d;
    if (dipole == "PR" || dipole == "NP") {
      d = presets::dipole(dipole);
    } else if (dipole != "custom") {
      throw ConfigError("unknown dipole '" + dipole + "' (PR|NP|custom)");
    } else if (!(dipole_d0_debye && dipole_q0 && dipole_q1 && dipole_sigma)) {
      throw ConfigError("dipole = custom requires dipole.d0_debye, dipole.q0, dipole.q1, dipole.sigma");
    }
    if (dipole_d0_debye) d.d0 = units::debye_to_au(*dipole_d0_debye);
    if (dipole_q0) d.q0 = *dipole_q0;
    if (dipole_q1) d.q1 = *dipole_q1;
    if (dipole_sigma) d.sigma = *dipole_sigma;
    d.validate();
    return d;
  }

  void validate() const {
    (void)resolve_potential();
    (void)resolve_dipole();
    q_grid.validate();
    x_grid.validate();
    if (lambda_g < 0.0) throw ConfigError("lambda_g must be >= 0");
    if (!(tau > 0.0)) throw ConfigError("tau_fs must be positive");
    if (!(1.0 + eta > 0.0)) throw ConfigError("eta must exceed -1");
    if (!(dt > 0.0)) throw ConfigError("dt_au must be positive");
    if (!(sample_fs > 0.0)) throw ConfigError("sample_fs must be positive");
    if (t_final < t_d + 4.0 * tau) throw ConfigError("t_final_fs must be >= t_d + 4 tau");
    if (fock_nmax < 2) throw ConfigError("fock_nmax must be >= 2");
  }
};

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(d)) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
  return d;
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0 || d != std::floor(d)) throw ConfigError("key '" + key + "': expected a non-negative integer");
  return static_cast<std::size_t>(d);
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace detail

/// Applies `kv` on top of `base`. Unknown keys are rejected.
inline Scenario apply_config(const KeyValues& kv, Scenario s = {}) {
  using detail::to_count;
  using detail::to_double;
  for (const auto& [key, value] : kv) {
    auto num = [&] { return to_double(key, value); };
    if (key == "name") s.name = value;
    else if (key == "potential") s.potential = value;
    else if (key == "morse.De_ev") s.morse_De_ev = num();
    else if (key == "morse.alpha") s.morse_alpha = num();
    else if (key == "morse.q_eq") s.morse_q_eq = num();
    else if (key == "morse.mu_amu") s.morse_mu_amu = num();
    else if (key == "harmonic.omega_cm1") s.harmonic_omega_cm1 = num();
    else if (key == "harmonic.q_eq") s.harmonic_q_eq = num();
    else if (key == "harmonic.mu_amu") s.harmonic_mu_amu = num();
    else if (key == "dipole") s.dipole = value;
    else if (key == "dipole.d0_debye") s.dipole_d0_debye = num();
    else if (key == "dipole.q0") s.dipole_q0 = num();
    else if (key == "dipole.q1") s.dipole_q1 = num();
    else if (key == "dipole.sigma") s.dipole_sigma = num();
    else if (key == "lambda_g") s.lambda_g = num();
    else if (key == "eta") s.eta = num();
    else if (key == "t_d_fs") s.t_d = num();
    else if (key == "tau_fs") s.tau = num();
    else if (key == "omega_c0_cm1") s.omega_c0_cm1 = num();
    else if (key == "vacuum_field") s.vacuum_field = parse_vacuum_field(value);
    else if (key == "initial_state") s.initial_state = parse_target_state(value);
    else if (key == "grid.q_min") s.q_grid.min = num();
    else if (key == "grid.q_max") s.q_grid.max = num();
    else if (key == "grid.q_points") s.q_grid.n = to_count(key, value);
    else if (key == "grid.x_min") s.x_grid.min = num();
    else if (key == "grid.x_max") s.x_grid.max = num();
    else if (key == "grid.x_points") s.x_grid.n = to_count(key, value);
    else if (key == "grid") {
      if (value == "default") {
        s.q_grid = default_q_grid();
        s.x_grid = default_x_grid();
      } else if (value == "compact") {
        s.q_grid = compact_q_grid();
        s.x_grid = compact_x_grid();
      } else {
        throw ConfigError("grid must be default|compact");
      }
    }
    else if (key == "dt_au") s.dt = num();
    else if (key == "t_final_fs") s.t_final = num();
    else if (key == "sample_fs") s.sample_fs = num();
    else if (key == "edge_tolerance") s.edge_tolerance = num();
    else if (key == "fock_frame") s.fock_frame = parse_fock_frame(value);
    else if (key == "fock_nmax") s.fock_nmax = to_count(key, value);
    else if (key == "imag_dt_au") s.imag_dt = num();
    else if (key == "imag_tol") s.imag_tol = num();
    else if (key == "prep_polish") s.prep_polish = parse_prep_polish(value);
    else if (key == "snapshot_every") s.snapshot_every = static_cast<int>(to_count(key, value));
    else if (key == "output") s.output = value;
    else if (key == "spectrum.lambda_g") {
      s.spectrum_lambdas.clear();
      std::istringstream items(value);
      for (std::string item; std::getline(items, item, ',');) s.spectrum_lambdas.push_back(to_double(key, trim(item)));
      if (s.spectrum_lambdas.empty()) throw ConfigError("spectrum.lambda_g: empty list");
    }
    else throw ConfigError("unknown config key '" + key + "'");
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return apply_config(parse_key_values(in, path));
}

inline Scenario parse_scenario(const std::string& text) {
  std::istringstream in(text);
  return apply_config(parse_key_values(in));
}

/// Fully resolved configuration, one `key = value` per line.
inline std::string format_scenario(const Scenario& s) {
  using detail::fmt;
  std::ostringstream os;
  auto line = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  line("name", s.name);
  line("potential", s.potential);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, MorseParams>) {
          line("morse.De_hartree", fmt(p.De));
          line("morse.alpha", fmt(p.alpha));
          line("morse.q_eq", fmt(p.q_eq));
          line("morse.mu_au", fmt(p.mu));
        } else {
          line("harmonic.omega_cm1", fmt(units::hartree_to_wavenumber(p.omega)));
          line("harmonic.q_eq", fmt(p.q_eq));
          line("harmonic.mu_au", fmt(p.mu));
        }
      },
      s.resolve_potential());
  const auto d = s.resolve_dipole();
  line("dipole", s.dipole);
  line("dipole.d0_au", fmt(d.d0));
  line("dipole.q0", fmt(d.q0));
  line("dipole.q1", fmt(d.q1));
  line("dipole.sigma", fmt(d.sigma));
  line("lambda_g", fmt(s.lambda_g));
  line("eta", fmt(s.eta));
  line("t_d_fs", fmt(s.t_d));
  line("tau_fs", fmt(s.tau));
  line("omega_c0_cm1", s.omega_c0_cm1 ? fmt(*s.omega_c0_cm1) : std::string("resonant"));
  line("vacuum_field", std::string(to_string(s.vacuum_field)));
  line("initial_state", std::string(to_string(s.initial_state)));
  line("grid.q_min", fmt(s.q_grid.min));
  line("grid.q_max", fmt(s.q_grid.max));
  line("grid.q_points", std::to_string(s.q_grid.n));
  line("grid.x_min", fmt(s.x_grid.min));
  line("grid.x_max", fmt(s.x_grid.max));
  line("grid.x_points", std::to_string(s.x_grid.n));
  line("dt_au", fmt(s.dt));
  line("t_final_fs", fmt(s.t_final));
  line("sample_fs", fmt(s.sample_fs));
  line("edge_tolerance", fmt(s.edge_tolerance));
  line("fock_frame", std::string(to_string(s.fock_frame)));
  line("fock_nmax", std::to_string(s.fock_nmax));
  line("imag_dt_au", fmt(s.imag_dt));
  line("imag_tol", fmt(s.imag_tol));
  line("prep_polish", std::string(to_string(s.prep_polish)));
  line("snapshot_every", std::to_string(s.snapshot_every));
  line("output", s.output);
  std::string lams;
  for (const double l : s.spectrum_lambdas) lams += (lams.empty() ? "" : ",") + fmt(l);
  line("spectrum.lambda_g", lams);
  return os.str();
}

/// Model quantities derived from a scenario.
struct ResolvedModel {
  CavityModel model;
  double omega_v = 0.0;  // bare 0 -> 1 gap on the q grid, hartree
  double d10 = 0.0;      // |<1|d|0>|, atomic units
};

inline ResolvedModel resolve_model(const Scenario& s) {
  const Potential pot = s.resolve_potential();
  const DipoleParams dip = s.resolve_dipole();
  const auto vib = vibrational_eigenstates(pot, s.q_grid, 2);
  ResolvedModel r;
  r.omega_v = vib.energies[1] - vib.energies[0];
  r.d10 = std::abs(transition_dipole(vib.state(1), vib.state(0), dip));
  const double w0 = s.omega_c0_cm1 ? units::wavenumber_to_hartree(*s.omega_c0_cm1) : r.omega_v;
  r.model = CavityModel{pot, dip, CavityModulation{w0, s.eta, s.t_d, s.tau},
                        CouplingSpec{s.lambda_g, r.d10, s.vacuum_field}};
  r.model.validate();
  return r;
}

}  // namespace vibpol
