#pragma once

// Multi-run reports: reference-table reproduction, polariton spectrum, anharmonicity
// sweep and the dense-basis cross-check.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "vibpol/dense_oracle.hpp"
#include "vibpol/runner.hpp"

#ifndef VIBPOL_DATA_DIR
#define VIBPOL_DATA_DIR "data"
#endif

namespace vibpol {

/// Runs task(i) for i in [0, n) on up to `jobs` threads.
inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& task) {
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Settings shared by the multi-scenario reports.
struct ReproductionOptions {
  Grid1D q_grid = compact_q_grid();
  Grid1D x_grid = compact_x_grid();
  double dt = 1.0;
  double t_final = 500.0;
  double sample_fs = 1.0;
  VacuumField field = VacuumField::Frozen;
  std::filesystem::path out_dir = "table2_out";
  bool write_files = true;
  unsigned jobs = 1;
  std::ostream* log = nullptr;

  Scenario base() const {
    Scenario s;
    s.q_grid = q_grid;
    s.x_grid = x_grid;
    s.dt = dt;
    s.t_final = t_final;
    s.sample_fs = sample_fs;
    s.vacuum_field = field;
    s.lambda_g = 0.2;
    s.fock_frame = FockFrame::Static;
    s.output = out_dir.string();
    return s;
  }
};

// --- reference table ---------------------------------------------------------------

inline constexpr double kTable2QTolerance = 0.05;
inline constexpr double kTable2ZetaTolerance = 0.15;  // dB

/// Column order: Q(0), zeta0(0), zeta_pi/2(0), Q(t_d), zeta0(t_d), zeta_pi/2(t_d).
using Table2Values = std::array<double, 6>;
inline constexpr std::array<const char*, 6> kTable2Columns{"Q(0)", "z0(0)", "zpi2(0)", "Q(td)", "z0(td)", "zpi2(td)"};

inline double table2_tolerance(std::size_t column) {
  return column % 3 == 0 ? kTable2QTolerance : kTable2ZetaTolerance;
}

struct Table2Case {
  std::string id;
  std::string dipole;
  TargetState state = TargetState::Ground;
  double eta = 0.0;
  Table2Values reference{};
};

inline std::vector<Table2Case> load_table2_reference(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference table " + path.string());
  std::vector<Table2Case> out;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    Table2Case c;
    std::string state;
    ls >> c.id >> c.dipole >> state >> c.eta;
    for (auto& v : c.reference) ls >> v;
    if (!ls) throw std::runtime_error("malformed reference row: " + line);
    c.state = parse_target_state(state);
    out.push_back(c);
  }
  if (out.empty()) throw std::runtime_error("reference table " + path.string() + " is empty");
  return out;
}

inline std::filesystem::path default_table2_reference() {
  return std::filesystem::path(VIBPOL_DATA_DIR) / "table2_reference.dat";
}

inline Table2Values table2_values(const RunResult& r, FockFrame f) {
  const auto& a = r.at_zero(f);
  const auto& b = r.at_peak(f);
  return {a.mandel_q, a.zeta_0, a.zeta_half_pi, b.mandel_q, b.zeta_0, b.zeta_half_pi};
}

/// Peak values from the adiabatic (instantaneous-eigenstate) approximation
/// in the dense basis: the t=0 and t_d eigenvectors of the requested branch.
inline Table2Values adiabatic_table2_values(const Scenario& s, int n_vib = 12, int n_fock = 40) {
  const auto rm = resolve_model(s);
  const int branch = s.initial_state == TargetState::Ground ? 0 : s.initial_state == TargetState::LowerPolariton ? 1 : 2;
  Table2Values v{};
  const double w0 = rm.model.modulation.omega_c0;
  for (int k = 0; k < 2; ++k) {
    const double t = k == 0 ? 0.0 : s.t_d;
    const auto c = rm.model.coefficients(t);
    const double wref = s.fock_frame == FockFrame::Static ? w0 : c.omega;
    const auto b = oracle::make_basis(rm.model.potential, rm.model.dipole, s.q_grid, n_vib, n_fock, wref);
    const auto ep = oracle::eigensolve(oracle::build_hamiltonian_from(b, c, oracle::Representation::Static), branch + 1);
    const oracle::CVector psi = ep.vectors.col(branch).cast<cplx>();
    const auto st = oracle::field_statistics(psi, b);
    v[3 * k] = st.mandel_q.value_or(kUndefinedQ);
    v[3 * k + 1] = squeezing_db(st.var_x);
    v[3 * k + 2] = squeezing_db(st.var_y);
  }
  return v;
}

struct Table2Row {
  Table2Case ref;
  bool failed = false;
  std::string error;
  std::map<FockFrame, Table2Values> computed;
  std::map<FockFrame, Table2Values> adiabatic_tracking;  // dense estimate, tracking vacuum field
  double residual_excitation = std::numeric_limits<double>::quiet_NaN();
  bool healthy = false;
  RunResult run;
};

struct Table2Report {
  std::vector<Table2Row> rows;
  FockFrame best_frame = FockFrame::Static;
  std::map<FockFrame, double> worst_ratio;  // max |deviation| / tolerance
  std::map<FockFrame, int> cells_within;
  bool all_healthy = true;
  std::string text;

  bool passes() const { return all_healthy && worst_ratio.at(best_frame) <= 1.0; }
};

inline std::string format_fixed(double v, int prec = 2) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%+.*f", prec, v);
  return buf;
}

inline Table2Report table2_report(const ReproductionOptions& opt,
                                  const std::filesystem::path& reference = default_table2_reference()) {
  Table2Report rep;
  const auto cases = load_table2_reference(reference);
  rep.rows.resize(cases.size());
  if (opt.write_files) std::filesystem::create_directories(opt.out_dir);

  // Cases sharing (dipole, state) start from the same eigenstate; prepare once.
  std::map<std::pair<std::string, TargetState>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < cases.size(); ++i) groups[{cases[i].dipole, cases[i].state}].push_back(i);
  std::vector<std::vector<std::size_t>> group_list;
  for (auto& [k, v] : groups) group_list.push_back(v);

  auto make = [&](const Table2Case& c) {
    Scenario s = opt.base();
    s.name = "case_" + c.id;
    s.dipole = c.dipole;
    s.initial_state = c.state;
    s.eta = c.eta;
    return s;
  };

  parallel_for(group_list.size(), opt.jobs, [&](std::size_t g) {
    const auto& idx = group_list[g];
    const Scenario first = make(cases[idx.front()]);
    std::vector<RelaxResult> prepared;
    std::string prep_error;
    try {
      const auto rm = resolve_model(first);
      SplitOperatorPropagator prop(rm.model, first.q_grid, first.x_grid);
      log_line(opt.log, "[table2] preparing " + first.dipole + " " + std::string(to_string(first.initial_state)));
      prepared = prepare_states(first, prop);
    } catch (const std::exception& e) {
      prep_error = e.what();
    }
    for (const std::size_t i : idx) {
      Table2Row& row = rep.rows[i];
      row.ref = cases[i];
      const Scenario s = make(cases[i]);
      for (const FockFrame f : {FockFrame::Static, FockFrame::Instantaneous}) {
        Scenario t = s;
        t.vacuum_field = VacuumField::Tracking;
        t.fock_frame = f;
        row.adiabatic_tracking[f] = adiabatic_table2_values(t);
      }
      if (!prep_error.empty()) {
        row.failed = true;
        row.error = "preparation failed: " + prep_error;
        continue;
      }
      RunOptions ro;
      ro.out_dir = opt.out_dir;
      ro.write_files = opt.write_files;
      ro.both_frames = true;
      ro.log = opt.log;
      row.run = run_scenario(s, ro, &prepared);
      const auto& r = row.run;
      row.failed = r.failed;
      row.error = r.error;
      row.healthy = r.healthy();
      row.residual_excitation = r.residual_excitation;
      if (!r.rows.empty() && r.t_d_row < r.rows.size() && r.t_d_row > 0) {
        for (const FockFrame f : {FockFrame::Static, FockFrame::Instantaneous}) row.computed[f] = table2_values(r, f);
      } else {
        row.failed = true;
        if (row.error.empty()) row.error = "t_d not reached";
      }
    }
  });

  for (const FockFrame f : {FockFrame::Static, FockFrame::Instantaneous}) {
    double worst = 0.0;
    int within = 0;
    for (const auto& row : rep.rows) {
      if (row.failed) {
        worst = std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t c = 0; c < 6; ++c) {
        const double d = std::abs(row.computed.at(f)[c] - row.ref.reference[c]);
        const double ratio = std::isnan(d) ? std::numeric_limits<double>::infinity() : d / table2_tolerance(c);
        worst = std::max(worst, ratio);
        within += ratio <= 1.0;
      }
    }
    rep.worst_ratio[f] = worst;
    rep.cells_within[f] = within;
  }
  for (const auto& row : rep.rows) rep.all_healthy = rep.all_healthy && !row.failed && row.healthy;
  rep.best_frame = rep.worst_ratio[FockFrame::Static] <= rep.worst_ratio[FockFrame::Instantaneous]
                       ? FockFrame::Static
                       : FockFrame::Instantaneous;

  std::ostringstream os;
  os << "# reference-table reproduction (vibpol " << kVersion << ")\n";
  os << "# vacuum_field = " << to_string(opt.field) << ", grid " << opt.q_grid.n << " x " << opt.x_grid.n
     << ", dt = " << opt.dt << " au, lambda_g = 0.2\n";
  os << "# tolerances: Q +-" << kTable2QTolerance << ", zeta +-" << kTable2ZetaTolerance << " dB\n";
  for (const FockFrame f : {FockFrame::Static, FockFrame::Instantaneous}) {
    os << "\n## frame: " << to_string(f) << "  (cells within tolerance: " << rep.cells_within[f] << "/"
       << 6 * rep.rows.size() << ", worst |dev|/tol = " << format_fixed(rep.worst_ratio[f], 3) << ")\n";
    os << "case dipole state eta  | column   computed reference deviation  ok\n";
    for (const auto& row : rep.rows) {
      if (row.failed) {
        os << row.ref.id << " FAILED: " << row.error << '\n';
        continue;
      }
      for (std::size_t c = 0; c < 6; ++c) {
        const double v = row.computed.at(f)[c];
        const double d = v - row.ref.reference[c];
        char line[200];
        std::snprintf(line, sizeof line, "%-4s %-3s %-15s %+.1f | %-8s %8s %9s %9s  %s\n", row.ref.id.c_str(),
                      row.ref.dipole.c_str(), std::string(to_string(row.ref.state)).c_str(), row.ref.eta,
                      kTable2Columns[c], format_fixed(v).c_str(), format_fixed(row.ref.reference[c]).c_str(),
                      format_fixed(d).c_str(), std::abs(d) <= table2_tolerance(c) ? "yes" : "NO");
        os << line;
      }
    }
  }
  os << "\n## tracking vacuum field, adiabatic dense-basis estimate (deviation from reference)\n";
  os << "case  frame          " ;
  for (const auto* c : kTable2Columns) os << ' ' << c;
  os << '\n';
  for (const auto& row : rep.rows)
    for (const FockFrame f : {FockFrame::Static, FockFrame::Instantaneous}) {
      os << row.ref.id << "  " << to_string(f);
      for (std::size_t c = 0; c < 6; ++c) os << ' ' << format_fixed(row.adiabatic_tracking.at(f)[c] - row.ref.reference[c]);
      os << '\n';
    }
  os << "\nresidual excitation after the pulse:";
  for (const auto& row : rep.rows) os << ' ' << row.ref.id << '=' << format_number(row.residual_excitation);
  os << "\nmatching frame: " << to_string(rep.best_frame) << '\n';
  os << "result: " << (rep.passes() ? "PASS" : "FAIL") << '\n';
  rep.text = os.str();
  if (opt.write_files) std::ofstream(opt.out_dir / "table2_report.txt") << rep.text;
  return rep;
}

// --- spectrum ----------------------------------------------------------------

struct SpectrumRow {
  double lambda_g = 0.0;
  std::array<double, 3> grid{};    // GS, LP, UP, hartree
  std::optional<std::array<double, 3>> dense;
  std::string note;
  bool grid_ok = true;
  double max_disagreement_cm = std::numeric_limits<double>::quiet_NaN();
};

struct SpectrumReport {
  std::vector<SpectrumRow> rows;
  double bandwidth_cm = 0.0;
  std::string text;
  bool passes(double tol_cm = 1.0) const {
    for (const auto& r : rows) {
      if (!r.grid_ok || !r.dense || !(r.max_disagreement_cm <= tol_cm)) return false;
    }
    return true;
  }
};

inline SpectrumRow spectrum_point(const Scenario& s0, double lambda_g, int n_vib = 12, int n_fock = 40) {
  Scenario s = s0;
  s.lambda_g = lambda_g;
  s.initial_state = TargetState::UpperPolariton;
  SpectrumRow row;
  row.lambda_g = lambda_g;
  const auto rm = resolve_model(s);
  try {
    SplitOperatorPropagator prop(rm.model, s.q_grid, s.x_grid);
    const auto st = prepare_states(s, prop);
    for (std::size_t i = 0; i < 3; ++i) row.grid[i] = st[i].energy;
  } catch (const std::exception& e) {
    row.grid_ok = false;
    row.note = std::string("grid relaxation failed: ") + e.what();
  }
  const auto conv = oracle::check_convergence(rm.model.potential, rm.model.dipole, s.q_grid, rm.model, n_vib, n_fock);
  if (conv.converged) {
    const auto b = oracle::make_basis(rm.model.potential, rm.model.dipole, s.q_grid, n_vib, n_fock,
                                      rm.model.modulation.omega_c0);
    const auto ep = oracle::static_spectrum(b, rm.model, 3);
    row.dense = std::array<double, 3>{ep.values(0), ep.values(1), ep.values(2)};
    if (row.grid_ok) {
      double m = 0.0;
      for (std::size_t i = 0; i < 3; ++i) m = std::max(m, std::abs(row.grid[i] - (*row.dense)[i]));
      row.max_disagreement_cm = units::hartree_to_wavenumber(m);
    }
  } else {
    row.note += (row.note.empty() ? "" : "; ") + std::string("oracle unconverged (shift ") +
                format_fixed(conv.max_shift_cm, 3) + " cm-1)";
  }
  return row;
}

inline SpectrumReport spectrum_report(const Scenario& s, unsigned jobs = 1, std::ostream* log = nullptr) {
  SpectrumReport rep;
  rep.bandwidth_cm = s.bandwidth_cm1();
  rep.rows.resize(s.spectrum_lambdas.size());
  parallel_for(s.spectrum_lambdas.size(), jobs, [&](std::size_t i) {
    log_line(log, "[spectrum] lambda_g = " + format_number(s.spectrum_lambdas[i]));
    rep.rows[i] = spectrum_point(s, s.spectrum_lambdas[i]);
  });
  auto cm = [](double h) { return units::hartree_to_wavenumber(h); };
  std::ostringstream os;
  os << "# polariton spectrum: potential " << s.potential << ", dipole " << s.dipole << ", vacuum field "
     << to_string(s.vacuum_field) << ", grid " << s.q_grid.n << " x " << s.x_grid.n << '\n';
  os << "# pulse bandwidth = " << format_fixed(rep.bandwidth_cm, 1) << " cm-1 (tau = " << s.tau << " fs)\n";
  os << "# energies in cm-1 relative to the grid ground state at lambda_g = 0 are not shifted; gaps are differences\n";
  os << "lambda_g  source  E_GS          E_LP          E_UP          GS->LP    LP->UP   (GS->LP)/dw  (LP->UP)/dw\n";
  for (const auto& r : rep.rows) {
    auto put = [&](const char* src, const std::array<double, 3>& e) {
      const double g1 = cm(e[1] - e[0]), g2 = cm(e[2] - e[1]);
      char line[240];
      std::snprintf(line, sizeof line, "%-8.3f  %-6s  %-12.3f  %-12.3f  %-12.3f  %-8.2f  %-8.2f %-11.3f  %-11.3f\n",
                    r.lambda_g, src, cm(e[0]), cm(e[1]), cm(e[2]), g1, g2, g1 / rep.bandwidth_cm,
                    g2 / rep.bandwidth_cm);
      os << line;
    };
    if (r.grid_ok) put("grid", r.grid);
    if (r.dense) put("dense", *r.dense);
    else os << format_fixed(r.lambda_g, 3) << "     dense   (blank)\n";
    if (!std::isnan(r.max_disagreement_cm))
      os << "          grid vs dense max |dE| = " << format_fixed(r.max_disagreement_cm, 4) << " cm-1\n";
    if (!r.note.empty()) os << "          note: " << r.note << '\n';
  }
  os << "result: " << (rep.passes() ? "PASS" : "FAIL") << '\n';
  rep.text = os.str();
  return rep;
}

// --- anharmonicity sweep ------------------------------------------------------

struct SweepRun {
  std::string potential, dipole;
  double eta = 0.0;
  RunResult result;
  std::string label() const { return dipole + "_" + potential + (eta > 0 ? "_blue" : "_red"); }
};

struct SweepReport {
  std::vector<SweepRun> runs;
  FockFrame frame = FockFrame::Static;
  double q0_A = 0.0, q0_B = 0.0, q0_C = 0.0;  // PR, t = 0
  bool ordering_ok = false;
  double np_max_spread = 0.0;
  double np_spread_other_frame = 0.0;  // informational
  bool all_healthy = true;
  std::string text;
  bool passes(double np_tol = 0.02) const { return all_healthy && ordering_ok && np_max_spread <= np_tol; }
};

inline SweepReport anharmonicity_sweep(const ReproductionOptions& opt) {
  SweepReport rep;
  const std::array<std::string, 3> pots{"VA", "VB", "VC"};
  const std::array<std::string, 2> dips{"PR", "NP"};
  const std::array<double, 2> etas{0.2, -0.2};
  for (const auto& d : dips)
    for (const auto& p : pots)
      for (const double e : etas) rep.runs.push_back({p, d, e, {}});
  if (opt.write_files) std::filesystem::create_directories(opt.out_dir);

  // One preparation per (potential, dipole); both eta signs share it.
  const std::size_t n_groups = rep.runs.size() / 2;
  parallel_for(n_groups, opt.jobs, [&](std::size_t g) {
    Scenario s = opt.base();
    s.potential = rep.runs[2 * g].potential;
    s.dipole = rep.runs[2 * g].dipole;
    s.initial_state = TargetState::Ground;
    const auto rm = resolve_model(s);
    SplitOperatorPropagator prop(rm.model, s.q_grid, s.x_grid);
    log_line(opt.log, "[sweep] preparing " + s.dipole + " " + s.potential);
    const auto prepared = prepare_states(s, prop);
    for (std::size_t k = 0; k < 2; ++k) {
      SweepRun& run = rep.runs[2 * g + k];
      s.eta = run.eta;
      s.name = "sweep_" + run.label();
      RunOptions ro;
      ro.out_dir = opt.out_dir;
      ro.write_files = opt.write_files;
      ro.log = opt.log;
      run.result = run_scenario(s, ro, &prepared);
    }
  });

  for (const auto& r : rep.runs) rep.all_healthy = rep.all_healthy && r.result.healthy();
  auto q0 = [&](const std::string& p) {
    for (const auto& r : rep.runs)
      if (r.dipole == "PR" && r.potential == p && !r.result.rows.empty()) return r.result.at_zero(rep.frame).mandel_q;
    return std::numeric_limits<double>::quiet_NaN();
  };
  rep.q0_A = q0("VA");
  rep.q0_B = q0("VB");
  rep.q0_C = q0("VC");
  rep.ordering_ok = rep.q0_A > rep.q0_B && rep.q0_B >= rep.q0_C;
  auto spread = [&](FockFrame f) {
    double m = 0.0;
    for (const double e : etas) {
      std::vector<const RunResult*> np;
      for (const auto& r : rep.runs)
        if (r.dipole == "NP" && r.eta == e) np.push_back(&r.result);
      for (const auto* a : np)
        for (const auto* b : np) {
          const auto& ra = a->frame_rows(f);
          const auto& rb = b->frame_rows(f);
          if (ra.size() != rb.size()) return std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < ra.size(); ++i) m = std::max(m, std::abs(ra[i].mandel_q - rb[i].mandel_q));
        }
    }
    return m;
  };
  rep.np_max_spread = spread(rep.frame);
  rep.np_spread_other_frame = spread(other_frame(rep.frame));

  if (opt.write_files) {
    std::ofstream os(opt.out_dir / "anharmonicity_sweep.csv");
    os << "t_fs";
    for (const auto& r : rep.runs) os << ",Q_" << r.label();
    os << '\n';
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (const auto& r : rep.runs) n = std::min(n, r.result.frame_rows(rep.frame).size());
    for (std::size_t i = 0; i < n; ++i) {
      os << format_number(rep.runs.front().result.frame_rows(rep.frame)[i].t);
      for (const auto& r : rep.runs) os << ',' << format_number(r.result.frame_rows(rep.frame)[i].mandel_q);
      os << '\n';
    }
  }
  std::ostringstream os;
  os << "# anharmonicity sweep (lambda_g = 0.2, ground state, vacuum field " << to_string(opt.field) << ", frame "
     << to_string(rep.frame) << ")\n";
  for (const auto& r : rep.runs) {
    const auto& rr = r.result;
    os << r.label() << ": ";
    if (rr.rows.empty() || rr.failed) {
      os << "FAILED " << rr.error << '\n';
      continue;
    }
    const auto& rows = rr.frame_rows(rep.frame);
    double qmin = rows.front().mandel_q;
    for (const auto& x : rows) qmin = std::min(qmin, x.mandel_q);
    os << "Q(0) = " << format_fixed(rows.front().mandel_q, 4) << "  Q(t_d) = " << format_fixed(rr.at_peak(rep.frame).mandel_q, 4)
       << "  min Q = " << format_fixed(qmin, 4) << (rr.healthy() ? "" : "  [unhealthy]") << '\n';
  }
  os << "PR ordering Q_A(0) > Q_B(0) >= Q_HO(0): " << format_fixed(rep.q0_A, 4) << ' ' << format_fixed(rep.q0_B, 4) << ' '
     << format_fixed(rep.q0_C, 4) << (rep.ordering_ok ? "  holds" : "  VIOLATED") << '\n';
  os << "NP max pairwise |dQ(t)| = " << format_fixed(rep.np_max_spread, 4) << " (" << to_string(rep.frame)
     << " frame; " << format_fixed(rep.np_spread_other_frame, 4) << " in the " << to_string(other_frame(rep.frame))
     << " frame)\n";
  os << "result: " << (rep.passes() ? "PASS" : "FAIL") << '\n';
  rep.text = os.str();
  if (opt.write_files) std::ofstream(opt.out_dir / "anharmonicity_sweep.txt") << rep.text;
  return rep;
}

// --- oracle check --------------------------------------------------------------

struct OracleCheck {
  SpectrumRow spectrum;
  double overlap = 0.0;        // |<grid|dense>|^2 after the window
  double window_start_fs = 0.0;
  double window_fs = 0.0;
  std::string text;
  bool passes(double tol_cm = 1.0, double min_overlap = 0.9999) const {
    return spectrum.grid_ok && spectrum.dense && spectrum.max_disagreement_cm <= tol_cm && overlap >= min_overlap;
  }
};

/// Compares grid and dense-basis results for one scenario: the lowest three
/// levels and a short real-time propagation across the pulse centre.
inline OracleCheck oracle_check(const Scenario& s, double window_fs = 50.0, int n_vib = 10, int n_fock = 30,
                                double dense_dt = 4.0) {
  OracleCheck oc;
  oc.spectrum = spectrum_point(s, s.lambda_g, n_vib, n_fock);
  const auto rm = resolve_model(s);
  const auto b = oracle::make_basis(rm.model.potential, rm.model.dipole, s.q_grid, n_vib, n_fock,
                                    rm.model.modulation.omega_c0);
  const int branch = s.initial_state == TargetState::Ground ? 0 : s.initial_state == TargetState::LowerPolariton ? 1 : 2;
  const auto ep = oracle::static_spectrum(b, rm.model, branch + 1);
  oracle::CVector c0 = ep.vectors.col(branch).cast<cplx>();
  oc.window_start_fs = s.t_d - 0.5 * window_fs;
  oc.window_fs = window_fs;

  Wavefunction2D psi = oracle::to_grid(c0, b, s.x_grid);
  psi.normalize();
  SplitOperatorPropagator prop(rm.model, s.q_grid, s.x_grid);
  const double t0 = units::fs_to_au(oc.window_start_fs);
  const auto n_grid = static_cast<std::size_t>(std::lround(units::fs_to_au(window_fs) / s.dt));
  prop.evolve(psi, t0, n_grid, s.dt);
  const double t_end_au = t0 + static_cast<double>(n_grid) * s.dt;
  const auto n_dense = static_cast<std::size_t>(std::lround((t_end_au - t0) / dense_dt));
  const double dd = (t_end_au - t0) / static_cast<double>(n_dense);
  const auto c1 = oracle::propagate_dense(c0, b, rm.model, oc.window_start_fs, n_dense, dd);
  auto dense_grid = oracle::to_grid(c1, b, s.x_grid);
  dense_grid.normalize();
  oc.overlap = std::norm(inner_product(dense_grid, psi));

  std::ostringstream os;
  os << "# dense-basis cross-check: " << s.potential << ' ' << s.dipole << " lambda_g = " << s.lambda_g
     << " eta = " << s.eta << " vacuum field " << to_string(s.vacuum_field) << '\n';
  os << "# basis " << n_vib << " vibrational x " << n_fock << " Fock states; grid " << s.q_grid.n << " x " << s.x_grid.n
     << '\n';
  auto cm = [](double h) { return units::hartree_to_wavenumber(h); };
  if (oc.spectrum.grid_ok) {
    os << "grid  levels (cm-1):";
    for (const double e : oc.spectrum.grid) os << ' ' << format_fixed(cm(e), 3);
    os << '\n';
  }
  if (oc.spectrum.dense) {
    os << "dense levels (cm-1):";
    for (const double e : *oc.spectrum.dense) os << ' ' << format_fixed(cm(e), 3);
    os << '\n';
    os << "max |dE| = " << format_fixed(oc.spectrum.max_disagreement_cm, 4) << " cm-1\n";
  }
  if (!oc.spectrum.note.empty()) os << "note: " << oc.spectrum.note << '\n';
  os << "short-time overlap over [" << format_fixed(oc.window_start_fs, 1) << ", "
     << format_fixed(oc.window_start_fs + window_fs, 1) << "] fs from the " << to_string(s.initial_state)
     << ": " << format_number(oc.overlap) << '\n';
  os << "result: " << (oc.passes() ? "PASS" : "FAIL") << '\n';
  oc.text = os.str();
  return oc;
}

}  // namespace vibpol
