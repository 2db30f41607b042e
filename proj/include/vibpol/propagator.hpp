#pragma once

// Split-operator propagation on the (q, x) product grid.
//
// Real time: second-order Strang splitting
//   exp(-i V(t+dt/2) dt/2) exp(-i T dt) exp(-i V(t+dt/2) dt/2)
// with exact kinetic sub-steps in the Fourier representation.
//
// Imaginary time: the same splitting with dt -> -i dtau, renormalization
// after every step and Gram-Schmidt deflation against previously converged
// states, used to prepare the ground and polariton eigenstates.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vibpol/cavity.hpp"
#include "vibpol/grid.hpp"
#include "vibpol/hermite.hpp"
#include "vibpol/molecule.hpp"
#include "vibpol/units.hpp"

namespace vibpol {

class PropagationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RelaxationError : public std::runtime_error {
 public:
  RelaxationError(const std::string& what, double last_drift)
      : std::runtime_error(what), last_drift_(last_drift) {}
  double last_drift() const { return last_drift_; }

 private:
  double last_drift_;
};

struct PropagationSettings {
  double dt = 1.0;          // atomic time units
  double t_final = 800.0;   // fs
  int sample_stride = 200;  // steps between observable records
  double edge_tolerance = 1e-6;
  std::vector<std::size_t> extra_samples;  // additional step indices to record

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("PropagationSettings: dt must be positive");
    if (!(t_final > 0.0)) throw std::invalid_argument("PropagationSettings: t_final must be positive");
    if (sample_stride < 1) throw std::invalid_argument("PropagationSettings: sample_stride must be >= 1");
  }
};

enum class TargetState { Ground, LowerPolariton, UpperPolariton };

inline std::string_view to_string(TargetState s) {
  switch (s) {
    case TargetState::Ground: return "ground";
    case TargetState::LowerPolariton: return "lower_polariton";
    case TargetState::UpperPolariton: return "upper_polariton";
  }
  return "?";
}

inline TargetState parse_target_state(std::string_view s) {
  if (s == "ground" || s == "GS") return TargetState::Ground;
  if (s == "lower_polariton" || s == "LP") return TargetState::LowerPolariton;
  if (s == "upper_polariton" || s == "UP") return TargetState::UpperPolariton;
  throw std::invalid_argument("unknown initial state '" + std::string(s) + "'");
}

/// Post-processing of imaginary-time states.
///   hamiltonian: dtau extrapolation towards eigenvectors of H
///   propagator:  Ritz polish to eigenvectors of the real-time Strang step
enum class PrepPolish { None, Hamiltonian, Propagator };

inline std::string_view to_string(PrepPolish p) {
  return p == PrepPolish::None ? "none" : p == PrepPolish::Hamiltonian ? "hamiltonian" : "propagator";
}

inline PrepPolish parse_prep_polish(std::string_view s) {
  if (s == "none") return PrepPolish::None;
  if (s == "hamiltonian") return PrepPolish::Hamiltonian;
  if (s == "propagator") return PrepPolish::Propagator;
  throw std::invalid_argument("unknown prep_polish '" + std::string(s) + "' (expected hamiltonian|propagator|none)");
}

struct EigenstatePrep {
  TargetState target = TargetState::Ground;
  std::vector<const Wavefunction2D*> deflation;
  double tolerance = 1e-10;  // |dE/dtau|, hartree per atomic time unit
  double state_tolerance = 1e-10;  // ||d psi / dtau|| per atomic time unit
  double dtau = 2.0;         // imaginary time step, atomic units
  int max_steps = 200000;
  int check_every = 10;
};

struct RelaxResult {
  double energy = 0.0;
  Wavefunction2D psi;
  int steps = 0;
  double drift = 0.0;
  double state_drift = 0.0;
  std::vector<double> energy_history;  // one entry per energy check
};

class SplitOperatorPropagator {
 public:
  SplitOperatorPropagator(CavityModel model, Grid1D q, Grid1D x)
      : model_(std::move(model)), q_(q), x_(x), fft_(q.n, x.n), kinetic_(q, x, model_.mass_q(), 1.0) {
    model_.validate();
    q_.validate();
    x_.validate();
    vq_.resize(q.n);
    dq_.resize(q.n);
    for (std::size_t i = 0; i < q.n; ++i) {
      vq_[i] = potential_energy(q.point(i), model_.potential);
      dq_[i] = dipole_moment(q.point(i), model_.dipole);
    }
    xs_ = x.points();
  }

  const CavityModel& model() const { return model_; }
  const Grid1D& q_grid() const { return q_; }
  const Grid1D& x_grid() const { return x_; }
  const FourierTransform2D& fft() const { return fft_; }

  // --- real time -----------------------------------------------------------

  /// One Strang step from t (atomic units) to t + dt.
  void step_real(Wavefunction2D& psi, double t_au, double dt) {
    const auto c = model_.coefficients(units::au_to_fs(t_au + 0.5 * dt));
    apply_potential(psi, 1.0, c.quad, c.lin, 0.5 * dt);
    apply_kinetic(psi, dt);
    apply_potential(psi, 1.0, c.quad, c.lin, 0.5 * dt);
  }

  /// `n` consecutive Strang steps of size dt starting at t_au. Adjacent
  /// half-step potential phases are merged, which is algebraically identical
  /// to repeated step_real() calls. dt may be negative (backward in time).
  void evolve(Wavefunction2D& psi, double t_au, std::size_t n, double dt) {
    if (n == 0) return;
    auto coeff = [&](std::size_t k) {
      return model_.coefficients(units::au_to_fs(t_au + (static_cast<double>(k) + 0.5) * dt));
    };
    auto c = coeff(0);
    apply_potential(psi, 1.0, c.quad, c.lin, 0.5 * dt);
    for (std::size_t k = 0; k < n; ++k) {
      apply_kinetic(psi, dt);
      if (k + 1 < n) {
        const auto next = coeff(k + 1);
        apply_potential(psi, 2.0, c.quad + next.quad, c.lin + next.lin, 0.5 * dt);
        c = next;
      } else {
        apply_potential(psi, 1.0, c.quad, c.lin, 0.5 * dt);
      }
    }
  }

  /// Replaces psi by the nearest eigenvector of the static real-time Strang
  /// propagator with step dt. Rayleigh-Ritz in the Krylov space of U^stride;
  /// removes the O(dt^2) mismatch between imaginary- and real-time splitting.
  /// Returns the residual estimate of the selected Ritz pair.
  double refine_stationary(Wavefunction2D& psi, double dt, int krylov_dim = 20, int stride = 20) {
    if (krylov_dim < 2 || stride < 1 || !(dt > 0.0)) {
      throw std::invalid_argument("refine_stationary: invalid settings");
    }
    const auto c = model_.static_coefficients();
    const int m = krylov_dim;
    std::vector<Wavefunction2D> basis{psi};
    basis.front().normalize();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    int used = m;
    for (int j = 0; j < m; ++j) {
      Wavefunction2D w = basis[j];
      apply_potential(w, 1.0, c.quad, c.lin, 0.5 * dt);
      for (int k = 0; k < stride; ++k) {
        apply_kinetic(w, dt);
        apply_potential(w, k + 1 < stride ? 2.0 : 1.0, k + 1 < stride ? 2.0 * c.quad : c.quad,
                        k + 1 < stride ? 2.0 * c.lin : c.lin, 0.5 * dt);
      }
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const cplx ov = inner_product(basis[i], w);
          h(i, j) += ov;
          w.axpy(-ov, basis[i]);
        }
      const double nrm = std::sqrt(w.norm_squared());
      h(j + 1, j) = nrm;
      if (nrm < 1e-14) {  // invariant subspace
        used = j + 1;
        break;
      }
      w.normalize();
      basis.push_back(std::move(w));
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h.topLeftCorner(used, used));
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < used; ++k)
      if (std::abs(es.eigenvectors()(0, k)) > std::abs(es.eigenvectors()(0, best))) best = k;
    const Eigen::VectorXcd y = es.eigenvectors().col(best);
    Wavefunction2D out = basis.front();
    for (auto& v : out.data()) v = 0.0;
    for (int i = 0; i < used; ++i) out.axpy(y(i), basis[i]);
    const cplx ov = inner_product(psi, out);
    const cplx phase = std::abs(ov) > 0.0 ? std::conj(ov) / std::abs(ov) : cplx{1.0};
    for (auto& v : out.data()) v *= phase;
    out.normalize();
    psi = std::move(out);
    return used < m ? 0.0 : std::abs(h(m, m - 1) * y(m - 1));
  }

  /// <H(t)> for the Hamiltonian with the given diagonal coefficients.
  double energy(const Wavefunction2D& psi, const CavityModel::Coefficients& c) const {
    ComplexBuffer work(psi.data().begin(), psi.data().end());
    fft_.forward(work.data());
    const std::size_t nq = q_.n, nx = x_.n;
    double t = 0.0;
    for (std::size_t iq = 0; iq < nq; ++iq)
      for (std::size_t ix = 0; ix < nx; ++ix)
        t += std::norm(work[iq * nx + ix]) * (kinetic_.tq[iq] + kinetic_.tx[ix]);
    t *= psi.cell() / static_cast<double>(nq * nx);
    double v = 0.0;
    for (std::size_t iq = 0; iq < nq; ++iq)
      for (std::size_t ix = 0; ix < nx; ++ix)
        v += std::norm(psi(iq, ix)) * diagonal(iq, ix, c);
    v *= psi.cell();
    return t + v;
  }

  double static_energy(const Wavefunction2D& psi) const {
    return energy(psi, model_.static_coefficients());
  }

  // --- imaginary time ------------------------------------------------------

  /// Zeroth-order guess for the requested eigenstate of the undriven
  /// Hamiltonian built from the bare vibrational levels and cavity Fock
  /// states at w_c0. The polariton guesses are (|1,0> -+ s |0,1>)/sqrt(2)
  /// with s the sign of the bare coupling matrix element.
  Wavefunction2D initial_guess(TargetState target) const {
    const auto vib = vibrational_eigenstates(model_.potential, q_, 2);
    const auto chi = hermite_functions(x_, model_.modulation.omega_c0, 1);
    const auto phi0 = vib.column(0);
    const auto phi1 = vib.column(1);
    if (target == TargetState::Ground) {
      auto g = Wavefunction2D::product(q_, x_, phi0, chi[0]);
      g.normalize();
      return g;
    }
    const double d10 = transition_dipole(vib.state(1), vib.state(0), model_.dipole);
    const double s = (d10 * model_.static_coefficients().lin >= 0.0) ? 1.0 : -1.0;
    auto a = Wavefunction2D::product(q_, x_, phi1, chi[0]);
    const auto b = Wavefunction2D::product(q_, x_, phi0, chi[1]);
    const double sign = target == TargetState::LowerPolariton ? -s : s;
    a.axpy(sign, b);
    a.normalize();
    return a;
  }

  RelaxResult relax(Wavefunction2D psi, const EigenstatePrep& prep) const {
    check_deflation_set(prep.deflation);
    for (const auto* d : prep.deflation) require_same_grid(psi, *d, "relax");
    if (!(prep.dtau > 0.0) || prep.check_every < 1) {
      throw std::invalid_argument("relax: invalid imaginary time settings");
    }
    const auto c = model_.static_coefficients();
    const std::size_t nq = q_.n, nx = x_.n;
    const double h = 0.5 * prep.dtau;
    std::vector<double> ev(nq * nx), ek(nq * nx);
    const double inv_n = 1.0 / static_cast<double>(nq * nx);
    for (std::size_t iq = 0; iq < nq; ++iq)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        // Clamp the exponent so the hard Morse wall cannot overflow.
        ev[iq * nx + ix] = std::exp(-std::min(h * diagonal(iq, ix, c), 700.0));
        ek[iq * nx + ix] = std::exp(-prep.dtau * (kinetic_.tq[iq] + kinetic_.tx[ix])) * inv_n;
      }

    project_out(psi, prep.deflation);
    psi.normalize();

    RelaxResult r;
    double e_prev = static_energy(psi);
    r.energy_history.push_back(e_prev);
    double drift = std::numeric_limits<double>::infinity();
    double state_drift = drift;
    Wavefunction2D last = psi;
    int step = 0;
    while (step < prep.max_steps) {
      for (int k = 0; k < prep.check_every; ++k, ++step) {
        auto data = psi.data();
        for (std::size_t i = 0; i < data.size(); ++i) data[i] *= ev[i];
        fft_.forward(psi.raw());
        for (std::size_t i = 0; i < data.size(); ++i) data[i] *= ek[i];
        fft_.backward_unscaled(psi.raw());
        for (std::size_t i = 0; i < data.size(); ++i) data[i] *= ev[i];
        project_out(psi, prep.deflation);
        psi.normalize();
      }
      const double e = static_energy(psi);
      r.energy_history.push_back(e);
      drift = std::abs(e - e_prev) / (prep.check_every * prep.dtau);
      e_prev = e;
      double d2 = 0.0;
      const auto cur = psi.data();
      const auto old = last.data();
      for (std::size_t i = 0; i < cur.size(); ++i) d2 += std::norm(cur[i] - old[i]);
      state_drift = std::sqrt(d2 * psi.cell()) / (prep.check_every * prep.dtau);
      std::copy(cur.begin(), cur.end(), last.data().begin());
      if (drift < prep.tolerance && state_drift < prep.state_tolerance) break;
    }
    if (!(drift < prep.tolerance && state_drift < prep.state_tolerance)) {
      throw RelaxationError("relax: no convergence after " + std::to_string(step) +
                                " imaginary-time steps (last drift " + std::to_string(drift) +
                                " hartree/au, state drift " + std::to_string(state_drift) + ")",
                            drift);
    }
    for (const auto* d : prep.deflation) {
      const double ov = std::norm(inner_product(*d, psi));
      if (ov > 0.5) {
        throw RelaxationError("relax: state collapsed onto a deflated eigenstate (overlap " +
                                  std::to_string(ov) + ")",
                              drift);
      }
    }
    r.energy = e_prev;
    r.psi = std::move(psi);
    r.steps = step;
    r.drift = drift;
    r.state_drift = state_drift;
    return r;
  }

  /// Relaxes the requested eigenstate, converging its lower neighbours first.
  /// Returns states in the order ground, LP, UP up to the target.
  /// `warm`, if given, supplies the starting states instead of initial_guess().
  std::vector<RelaxResult> prepare(TargetState target, EigenstatePrep base = {},
                                   const std::vector<RelaxResult>* warm = nullptr) const {
    std::vector<RelaxResult> out;
    const TargetState order[] = {TargetState::Ground, TargetState::LowerPolariton,
                                 TargetState::UpperPolariton};
    for (auto t : order) {
      EigenstatePrep p = base;
      p.target = t;
      p.deflation.clear();
      for (const auto& r : out) p.deflation.push_back(&r.psi);
      const std::size_t k = out.size();
      out.push_back(relax(warm && k < warm->size() ? (*warm)[k].psi : initial_guess(t), p));
      if (t == target) break;
    }
    return out;
  }

  /// prepare() at dtau and dtau/2, combined as (4 psi(dtau/2) - psi(dtau)) / 3.
  /// The imaginary-time split operator converges to an eigenvector of a
  /// Hamiltonian perturbed at O(dtau^2); the combination cancels that term.
  /// The states are re-orthonormalized in order.
  std::vector<RelaxResult> prepare_extrapolated(TargetState target, EigenstatePrep base = {}) const {
    const auto coarse = prepare(target, base);
    EigenstatePrep half = base;
    half.dtau = 0.5 * base.dtau;
    auto fine = prepare(target, half, &coarse);
    for (std::size_t k = 0; k < fine.size(); ++k) {
      Wavefunction2D& psi = fine[k].psi;
      for (auto& v : psi.data()) v *= 4.0 / 3.0;
      psi.axpy(-1.0 / 3.0, coarse[k].psi);
      for (std::size_t j = 0; j < k; ++j) psi.axpy(-inner_product(fine[j].psi, psi), fine[j].psi);
      psi.normalize();
      fine[k].energy = static_energy(psi);
      fine[k].steps += coarse[k].steps;
    }
    return fine;
  }

 private:
  double diagonal(std::size_t iq, std::size_t ix, const CavityModel::Coefficients& c) const {
    return vq_[iq] + c.quad * xs_[ix] * xs_[ix] + c.lin * dq_[iq] * xs_[ix];
  }

  // psi *= exp(-i h (vq_factor V(q) + quad x^2 + lin d(q) x)). The x
  // dependence of each row is a geometric progression on the uniform grid,
  // so only O(nq + nx) transcendental calls are needed per application.
  void apply_potential(Wavefunction2D& psi, double vq_factor, double quad, double lin, double h) {
    const std::size_t nq = q_.n, nx = x_.n;
    if (row_x_.size() != nx) row_x_.resize(nx);
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double a = h * quad * xs_[ix] * xs_[ix];
      row_x_[ix] = {std::cos(a), -std::sin(a)};
    }
    const double x0 = xs_.front();
    const double dx = x_.spacing();
    constexpr std::size_t kBlock = 32;  // re-seed the progression to bound rounding growth
    for (std::size_t iq = 0; iq < nq; ++iq) {
      const double aq = h * vq_factor * vq_[iq];
      const double b = h * lin * dq_[iq];
      const cplx row_q{std::cos(aq), -std::sin(aq)};
      const cplx stepf{std::cos(b * dx), -std::sin(b * dx)};
      cplx* row = psi.raw() + iq * nx;
      for (std::size_t start = 0; start < nx; start += kBlock) {
        const double xs = x0 + static_cast<double>(start) * dx;
        cplx f = row_q * cplx{std::cos(b * xs), -std::sin(b * xs)};
        const std::size_t end = std::min(nx, start + kBlock);
        for (std::size_t ix = start; ix < end; ++ix) {
          row[ix] *= f * row_x_[ix];
          f *= stepf;
        }
      }
    }
  }

  void apply_kinetic(Wavefunction2D& psi, double dt) {
    const std::size_t nq = q_.n, nx = x_.n;
    if (kinetic_dt_ != dt || kinetic_phase_.size() != nq * nx) {
      kinetic_phase_.resize(nq * nx);
      const double inv_n = 1.0 / static_cast<double>(nq * nx);
      for (std::size_t iq = 0; iq < nq; ++iq)
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double a = (kinetic_.tq[iq] + kinetic_.tx[ix]) * dt;
          kinetic_phase_[iq * nx + ix] = cplx{std::cos(a), -std::sin(a)} * inv_n;
        }
      kinetic_dt_ = dt;
    }
    fft_.forward(psi.raw());
    auto data = psi.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= kinetic_phase_[i];
    fft_.backward_unscaled(psi.raw());
  }

  static void project_out(Wavefunction2D& psi, const std::vector<const Wavefunction2D*>& set) {
    for (const auto* d : set) psi.axpy(-inner_product(*d, psi), *d);
  }

  static void check_deflation_set(const std::vector<const Wavefunction2D*>& set) {
    for (std::size_t i = 0; i < set.size(); ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const cplx ov = inner_product(*set[i], *set[j]);
        const double target = i == j ? 1.0 : 0.0;
        if (std::abs(ov - target) > 1e-10) {
          throw std::invalid_argument("relax: deflation states are not orthonormal");
        }
      }
  }

  CavityModel model_;
  Grid1D q_, x_;
  FourierTransform2D fft_;
  KineticTable kinetic_;
  std::vector<double> vq_, dq_, xs_;
  std::vector<cplx> row_x_;
  ComplexBuffer kinetic_phase_;
  double kinetic_dt_ = std::numeric_limits<double>::quiet_NaN();
};

struct PropagationResult {
  bool valid = true;
  std::string error;
  double t_reached = 0.0;  // fs
  std::size_t steps = 0;
};

/// Real-time run from t = 0 to settings.t_final. `observer(t_fs, psi)` is
/// called at t = 0, every sample_stride steps and at each extra sample step. On an edge-amplitude
/// violation the run stops and the result is flagged invalid.
inline PropagationResult propagate_scenario(
    SplitOperatorPropagator& prop, Wavefunction2D& psi, const PropagationSettings& settings,
    const std::function<void(double, const Wavefunction2D&)>& observer) {
  settings.validate();
  const auto& mod = prop.model().modulation;
  if (settings.t_final < mod.pulse_off_time()) {
    throw std::invalid_argument("propagate_scenario: t_final must reach t_d + 4 tau = " +
                                std::to_string(mod.pulse_off_time()) + " fs");
  }
  const auto total = static_cast<std::size_t>(std::ceil(units::fs_to_au(settings.t_final) / settings.dt - 1e-9));
  PropagationResult res;
  auto check = [&](double t_fs) {
    const double edge = psi.edge_ratio();
    if (!(edge < settings.edge_tolerance) || !psi.all_finite()) {
      res.valid = false;
      res.error = "edge amplitude ratio " + std::to_string(edge) + " at t = " +
                  std::to_string(t_fs) + " fs exceeds " + std::to_string(settings.edge_tolerance) +
                  " (grid too small)";
      return false;
    }
    return true;
  };
  if (!check(0.0)) return res;
  observer(0.0, psi);
  std::size_t done = 0;
  const auto stride = static_cast<std::size_t>(settings.sample_stride);
  while (done < total) {
    std::size_t next = std::min(total, (done / stride + 1) * stride);
    for (const std::size_t e : settings.extra_samples)
      if (e > done && e < next) next = e;
    const std::size_t n = next - done;
    prop.evolve(psi, static_cast<double>(done) * settings.dt, n, settings.dt);
    done += n;
    const double t_fs = units::au_to_fs(static_cast<double>(done) * settings.dt);
    res.steps = done;
    res.t_reached = t_fs;
    if (!check(t_fs)) return res;
    observer(t_fs, psi);
  }
  return res;
}

}  // namespace vibpol
