#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "vibpol/vibpol.hpp"

namespace {

struct ReproFlags {
  std::string grid = "compact";
  double dt = 1.0;
  double t_final = 500.0;
  double sample_fs = 1.0;
  std::string field = "frozen";
  unsigned jobs = vibpol::default_jobs();

  void add(CLI::App* app) {
    app->add_option("--grid", grid, "grid preset")->check(CLI::IsMember({"compact", "default"}));
    app->add_option("--dt", dt, "time step, atomic units")->check(CLI::PositiveNumber);
    app->add_option("--t-final", t_final, "propagation end, fs");
    app->add_option("--sample-fs", sample_fs, "sampling interval, fs")->check(CLI::PositiveNumber);
    app->add_option("--vacuum-field", field, "tracking | frozen")->check(CLI::IsMember({"tracking", "frozen"}));
    app->add_option("-j,--jobs", jobs, "parallel scenario workers")->check(CLI::PositiveNumber);
  }

  vibpol::ReproductionOptions options(const std::string& out, bool quiet) const {
    vibpol::ReproductionOptions o;
    if (grid == "default") {
      o.q_grid = vibpol::default_q_grid();
      o.x_grid = vibpol::default_x_grid();
    }
    o.dt = dt;
    o.t_final = t_final;
    o.sample_fs = sample_fs;
    o.field = vibpol::parse_vacuum_field(field);
    o.out_dir = out;
    o.jobs = jobs;
    o.log = quiet ? nullptr : &std::cerr;
    return o;
  }
};

int report(bool ok, const std::string& text) {
  std::cout << text;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cavity-modulated vibrational polariton field statistics"};
  app.set_version_flag("--version", std::string(vibpol::kVersion));
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress progress output");

  std::string config, out;
  bool both_frames = false;
  auto* run = app.add_subcommand("run", "propagate one scenario and write its CSV and summary");
  run->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out, "output directory (default: the scenario's output key)");
  run->add_flag("--both-frames", both_frames, "also write the CSV in the other Fock frame");

  std::string table_out = "table2_out", reference = vibpol::default_table2_reference().string();
  ReproFlags table_flags;
  auto* table2 = app.add_subcommand("table2", "reproduce the eight-case reference table");
  table2->add_option("--out", table_out, "output directory");
  table2->add_option("--reference", reference, "reference value file")->check(CLI::ExistingFile);
  table_flags.add(table2);

  auto* spectrum = app.add_subcommand("spectrum", "GS/LP/UP energies and gaps versus lambda_g");
  spectrum->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  unsigned spectrum_jobs = vibpol::default_jobs();
  spectrum->add_option("-j,--jobs", spectrum_jobs, "parallel workers")->check(CLI::PositiveNumber);

  std::string sweep_out = "sweep_out";
  ReproFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep-anharmonicity", "Q(t) for VA/VB/VC x PR/NP x blue/red modulation");
  sweep->add_option("--out", sweep_out, "output directory");
  sweep_flags.add(sweep);

  auto* oracle = app.add_subcommand("oracle-check", "compare grid and dense-basis results");
  oracle->add_option("--config", config, "scenario file")->required()->check(CLI::ExistingFile);
  double window = 50.0;
  oracle->add_option("--window-fs", window, "real-time comparison window centred on t_d")->check(CLI::PositiveNumber);

  std::string snapshot, frame = "instantaneous";
  std::size_t nmax = 60;
  auto* stats = app.add_subcommand("stats", "field statistics of a stored wavefunction snapshot");
  stats->add_option("--snapshot", snapshot, "snapshot file")->required()->check(CLI::ExistingFile);
  stats->add_option("--frame", frame, "instantaneous | static")->check(CLI::IsMember({"instantaneous", "static"}));
  stats->add_option("--nmax", nmax, "highest Fock state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  std::ostream* log = quiet ? nullptr : &std::cerr;

  try {
    if (*run) {
      const auto s = vibpol::load_scenario(config);
      vibpol::RunOptions ro;
      ro.out_dir = out;
      ro.both_frames = both_frames;
      ro.log = log;
      const auto r = vibpol::run_scenario(s, ro);
      std::cout << vibpol::format_summary(r);
      std::cout << "csv = " << r.csv_path.string() << '\n';
      return r.healthy() ? 0 : 1;
    }
    if (*table2) {
      const auto rep = vibpol::table2_report(table_flags.options(table_out, quiet), reference);
      return report(rep.passes(), rep.text);
    }
    if (*spectrum) {
      const auto rep = vibpol::spectrum_report(vibpol::load_scenario(config), spectrum_jobs, log);
      return report(rep.passes(), rep.text);
    }
    if (*sweep) {
      const auto rep = vibpol::anharmonicity_sweep(sweep_flags.options(sweep_out, quiet));
      return report(rep.passes(), rep.text);
    }
    if (*oracle) {
      const auto oc = vibpol::oracle_check(vibpol::load_scenario(config), window);
      return report(oc.passes(), oc.text);
    }
    if (*stats) {
      const auto snap = vibpol::read_snapshot(snapshot);
      vibpol::FourierTransform2D fft(snap.psi);
      const vibpol::FockBasisSpec spec{0.0, nmax, vibpol::parse_fock_frame(frame)};
      const auto st = vibpol::field_statistics(snap.t_fs, snap.omega_c_t, snap.psi, snap.psi, spec, snap.omega_c0, fft);
      std::cout << vibpol::kCsvHeader << '\n' << vibpol::csv_row(st) << '\n';
      std::cout << "# P(n):";
      for (const double p : st.p_of_n) std::cout << ' ' << vibpol::format_number(p);
      std::cout << '\n';
      return st.captured() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
