#pragma once

// prepare -> propagate -> analyze for one scenario, plus CSV and summary output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vibpol/field_stats.hpp"
#include "vibpol/propagator.hpp"
#include "vibpol/scenario.hpp"
#include "vibpol/snapshot.hpp"
#include "vibpol/units.hpp"

#ifndef VIBPOL_VERSION
#define VIBPOL_VERSION "0.0.0"
#endif

namespace vibpol {

inline constexpr const char* kVersion = VIBPOL_VERSION;

/// Health thresholds applied to every sampled snapshot.
struct HealthLimits {
  double norm_drift_per_ps = 1e-8;
  double heisenberg_slack = 1e-6;
  double crosscheck = 1e-4;
  double capture = kMinCapture;
};

struct RunOptions {
  std::filesystem::path out_dir;  // empty: use scenario.output
  bool both_frames = false;
  bool write_files = true;
  std::ostream* log = nullptr;
  HealthLimits limits{};
};

struct RunResult {
  Scenario scenario;
  ResolvedModel resolved;
  std::vector<double> prep_energies;  // GS, LP, UP up to the initial state
  std::vector<int> prep_steps;
  std::vector<FieldStatistics> rows;      // scenario frame
  std::vector<FieldStatistics> alt_rows;  // the other frame
  std::vector<double> norms;
  bool failed = false;
  std::string error;
  double t_reached = 0.0;
  std::size_t t_d_row = 0;
  double residual_excitation = std::numeric_limits<double>::quiet_NaN();
  double norm_drift_per_ps = 0.0;
  double min_heisenberg = std::numeric_limits<double>::infinity();
  double max_crosscheck = 0.0;
  double min_capture = 1.0;
  std::vector<std::string> gate_failures;
  std::filesystem::path csv_path, alt_csv_path, summary_path;

  bool healthy() const { return !failed && gate_failures.empty(); }
  const FieldStatistics& at_zero(FockFrame f) const { return frame_rows(f).front(); }
  const FieldStatistics& at_peak(FockFrame f) const { return frame_rows(f).at(t_d_row); }
  const std::vector<FieldStatistics>& frame_rows(FockFrame f) const {
    return f == scenario.fock_frame ? rows : alt_rows;
  }
};

inline std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

inline void log_line(std::ostream* log, const std::string& line) {
  if (!log) return;
  std::lock_guard lock(log_mutex());
  *log << line << '\n' << std::flush;
}

inline FockFrame other_frame(FockFrame f) {
  return f == FockFrame::Static ? FockFrame::Instantaneous : FockFrame::Static;
}

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

inline constexpr const char* kCsvHeader =
    "t_fs,omega_c_cm1,mean_n,var_n,mandel_q,var_x,var_y,zeta0_db,zeta_halfpi_db,autocorr,capture";

inline std::string csv_row(const FieldStatistics& s) {
  std::string r;
  for (const double v : {s.t, units::hartree_to_wavenumber(s.omega_c_t), s.mean_n, s.var_n, s.mandel_q, s.var_x,
                         s.var_y, s.zeta_0, s.zeta_half_pi, s.autocorr, s.capture}) {
    if (!r.empty()) r += ',';
    r += format_number(v);
  }
  return r;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<FieldStatistics>& rows,
                      const std::string& failure = {}) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << kCsvHeader << '\n';
  for (const auto& r : rows) os << csv_row(r) << '\n';
  if (!failure.empty()) os << "# FAILED: " << failure << '\n';
}

/// Ground, LP and UP (up to the scenario's initial state) on the scenario grid.
inline std::vector<RelaxResult> prepare_states(const Scenario& s, SplitOperatorPropagator& prop) {
  EigenstatePrep base;
  base.dtau = s.imag_dt;
  base.tolerance = s.imag_tol;
  switch (s.prep_polish) {
    case PrepPolish::Hamiltonian:
      return prop.prepare_extrapolated(s.initial_state, base);
    case PrepPolish::Propagator: {
      auto states = prop.prepare(s.initial_state, base);
      for (auto& st : states) prop.refine_stationary(st.psi, s.dt);
      return states;
    }
    case PrepPolish::None:
      break;
  }
  return prop.prepare(s.initial_state, base);
}

/// Step index nearest to t_d.
inline std::size_t peak_step(const Scenario& s) {
  return static_cast<std::size_t>(std::lround(units::fs_to_au(s.t_d) / s.dt));
}

inline std::string format_summary(const RunResult& r) {
  std::ostringstream os;
  const Scenario& s = r.scenario;
  os << "# vibpol " << kVersion << " run summary\n";
  os << "[config]\n" << format_scenario(s);
  os << "[derived]\n";
  os << "omega_v_cm1 = " << format_number(units::hartree_to_wavenumber(r.resolved.omega_v)) << '\n';
  os << "omega_c0_cm1 = " << format_number(units::hartree_to_wavenumber(r.resolved.model.modulation.omega_c0))
     << '\n';
  os << "d10_au = " << format_number(r.resolved.d10) << '\n';
  os << "bandwidth_cm1 = " << format_number(s.bandwidth_cm1()) << '\n';
  os << "grid = " << s.q_grid.n << " x " << s.x_grid.n << '\n';
  os << "dt_au = " << format_number(s.dt) << '\n';
  for (std::size_t i = 0; i < r.prep_energies.size(); ++i) {
    static const char* names[] = {"ground", "lower_polariton", "upper_polariton"};
    os << "energy_" << names[i] << "_cm1 = " << format_number(units::hartree_to_wavenumber(r.prep_energies[i]))
       << "  (" << r.prep_steps[i] << " imaginary-time steps)\n";
  }
  os << "[result]\n";
  os << "status = " << (r.failed ? "FAILED" : "completed") << '\n';
  if (r.failed) os << "error = " << r.error << '\n';
  os << "t_reached_fs = " << format_number(r.t_reached) << '\n';
  if (!r.rows.empty()) {
    for (const FockFrame f : {s.fock_frame, other_frame(s.fock_frame)}) {
      const auto& rows = r.frame_rows(f);
      const std::string tag(to_string(f));
      auto dump = [&](const char* when, const FieldStatistics& x) {
        os << tag << '.' << when << " = t_fs " << format_number(x.t) << " mean_n " << format_number(x.mean_n)
           << " var_n " << format_number(x.var_n) << " mandel_q " << format_number(x.mandel_q) << " zeta0_db "
           << format_number(x.zeta_0) << " zeta_halfpi_db " << format_number(x.zeta_half_pi) << '\n';
      };
      dump("t0", rows.front());
      if (r.t_d_row < rows.size()) dump("t_d", rows[r.t_d_row]);
    }
  }
  os << "residual_excitation = " << format_number(r.residual_excitation) << '\n';
  os << "norm_drift_per_ps = " << format_number(r.norm_drift_per_ps) << '\n';
  os << "min_heisenberg_product = " << format_number(r.min_heisenberg) << '\n';
  os << "max_moments_crosscheck = " << format_number(r.max_crosscheck) << '\n';
  os << "min_capture = " << format_number(r.min_capture) << '\n';
  os << "health = " << (r.healthy() ? "pass" : "FAIL") << '\n';
  for (const auto& g : r.gate_failures) os << "gate_failure = " << g << '\n';
  return os.str();
}

inline void evaluate_gates(RunResult& r, const HealthLimits& lim) {
  r.gate_failures.clear();
  if (r.rows.empty()) return;
  double max_dev = 0.0;
  for (const double n : r.norms) max_dev = std::max(max_dev, std::abs(n - 1.0));
  const double ps = r.t_reached / 1000.0;
  r.norm_drift_per_ps = ps > 0.0 ? max_dev / ps : 0.0;
  for (const auto* set : {&r.rows, &r.alt_rows})
    for (const auto& x : *set) {
      r.min_heisenberg = std::min(r.min_heisenberg, x.heisenberg_product());
      r.max_crosscheck = std::max(r.max_crosscheck, x.crosscheck);
      r.min_capture = std::min(r.min_capture, x.capture);
    }
  if (r.norm_drift_per_ps >= lim.norm_drift_per_ps) r.gate_failures.push_back("norm drift " + format_number(r.norm_drift_per_ps) + " per ps");
  if (r.min_heisenberg < 1.0 - lim.heisenberg_slack) r.gate_failures.push_back("Heisenberg product " + format_number(r.min_heisenberg));
  if (r.max_crosscheck >= lim.crosscheck) r.gate_failures.push_back("moments crosscheck " + format_number(r.max_crosscheck));
  if (r.min_capture < lim.capture) r.gate_failures.push_back("Fock capture " + format_number(r.min_capture));
}

/// Runs a scenario. `prepared`, when given, is used as the initial state
/// instead of relaxing it (it must be the undriven eigenstate on the
/// scenario's grid).
inline RunResult run_scenario(const Scenario& s, const RunOptions& opt = {},
                              const std::vector<RelaxResult>* prepared = nullptr) {
  s.validate();
  RunResult r;
  r.scenario = s;
  r.resolved = resolve_model(s);
  const auto& model = r.resolved.model;
  SplitOperatorPropagator prop(model, s.q_grid, s.x_grid);

  const std::filesystem::path dir = opt.out_dir.empty() ? std::filesystem::path(s.output) : opt.out_dir;
  if (opt.write_files) {
    std::filesystem::create_directories(dir);
    r.csv_path = dir / (s.name + ".csv");
    r.alt_csv_path = dir / (s.name + "." + std::string(to_string(other_frame(s.fock_frame))) + ".csv");
    r.summary_path = dir / (s.name + ".summary.txt");
  }
  auto finish = [&]() -> RunResult& {
    evaluate_gates(r, opt.limits);
    if (opt.write_files) {
      write_csv(r.csv_path, r.rows, r.failed ? r.error : std::string{});
      if (opt.both_frames) write_csv(r.alt_csv_path, r.alt_rows, r.failed ? r.error : std::string{});
      std::ofstream(r.summary_path) << format_summary(r);
    }
    return r;
  };

  std::vector<RelaxResult> own;
  try {
    if (!prepared) {
      log_line(opt.log, "[" + s.name + "] relaxing " + std::string(to_string(s.initial_state)));
      own = prepare_states(s, prop);
      prepared = &own;
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = std::string("preparation failed: ") + e.what();
    return finish();
  }
  for (const auto& p : *prepared) {
    r.prep_energies.push_back(p.energy);
    r.prep_steps.push_back(p.steps);
  }
  const Wavefunction2D& psi0 = prepared->back().psi;
  if (!psi0.same_grid(Wavefunction2D(s.q_grid, s.x_grid))) {
    throw std::invalid_argument("run_scenario: prepared state does not match the scenario grid");
  }
  Wavefunction2D psi = psi0;

  PropagationSettings ps;
  ps.dt = s.dt;
  ps.t_final = s.t_final;
  ps.sample_stride = s.sample_stride();
  ps.edge_tolerance = s.edge_tolerance;
  const std::size_t peak = peak_step(s);
  ps.extra_samples = {peak};

  FockBasisSpec spec{0.0, s.fock_nmax, s.fock_frame};
  FockBasisSpec alt{0.0, s.fock_nmax, other_frame(s.fock_frame)};
  const double w0 = model.modulation.omega_c0;
  const double dt_peak_fs = units::au_to_fs(static_cast<double>(peak) * s.dt);
  double best = std::numeric_limits<double>::infinity();
  const std::filesystem::path snap_dir = dir / (s.name + ".snapshots");
  std::size_t sample_index = 0;
  auto observer = [&](double t_fs, const Wavefunction2D& w) {
    const double wc = cavity_frequency(t_fs, model.modulation);
    r.rows.push_back(field_statistics(t_fs, wc, w, psi0, spec, w0, prop.fft()));
    r.alt_rows.push_back(field_statistics(t_fs, wc, w, psi0, alt, w0, prop.fft()));
    r.norms.push_back(w.norm_squared());
    if (std::abs(t_fs - dt_peak_fs) < best) {
      best = std::abs(t_fs - dt_peak_fs);
      r.t_d_row = r.rows.size() - 1;
    }
    if (opt.write_files && s.snapshot_every > 0 && sample_index % static_cast<std::size_t>(s.snapshot_every) == 0) {
      std::filesystem::create_directories(snap_dir);
      char name[32];
      std::snprintf(name, sizeof name, "%06zu.wf", sample_index);
      write_snapshot(snap_dir / name, Snapshot{t_fs, wc, w0, w});
    }
    ++sample_index;
    if (r.rows.size() % 100 == 0) {
      log_line(opt.log, "[" + s.name + "] t = " + format_number(t_fs) + " fs, Q = " + format_number(r.rows.back().mandel_q));
    }
  };
  try {
    const auto res = propagate_scenario(prop, psi, ps, observer);
    r.t_reached = res.t_reached;
    if (!res.valid) {
      r.failed = true;
      r.error = res.error;
    }
  } catch (const std::exception& e) {
    r.failed = true;
    r.error = std::string("propagation failed: ") + e.what();
  }
  if (!r.failed) {
    const double t_off = model.modulation.pulse_off_time();
    double sum = 0.0;
    int count = 0;
    for (const auto& x : r.rows)
      if (x.t >= t_off - 1e-9) {
        sum += x.autocorr;
        ++count;
      }
    if (count > 0) r.residual_excitation = 1.0 - sum / count;
  }
  return finish();
}

}  // namespace vibpol
