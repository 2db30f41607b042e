#pragma once

// Uniform 1D/2D grids, complex wavefunctions on the (q, x) product grid and
// the Fourier machinery shared by the propagator and the field statistics.
//
// Storage is row-major with q as the slow index: psi(iq, ix) lives at
// iq * nx + ix. Both axes are treated as periodic for spectral operations;
// that is only valid while the wavefunction is negligible at the grid edges
// (see edge_ratio()).

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <new>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vibpol {

using cplx = std::complex<double>;

struct Grid1D {
  double min = 0.0;
  double max = 1.0;
  std::size_t n = 2;

  double spacing() const { return (max - min) / static_cast<double>(n - 1); }
  double point(std::size_t i) const { return min + static_cast<double>(i) * spacing(); }
  // Period of the Fourier representation (n samples of width spacing()).
  double period() const { return static_cast<double>(n) * spacing(); }

  std::vector<double> points() const {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = point(i);
    return p;
  }

  // Angular wavenumbers in FFTW output order.
  std::vector<double> wavenumbers() const {
    std::vector<double> k(n);
    const double dk = 2.0 * std::numbers::pi / period();
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<double>(j);
      k[j] = (j < (n + 1) / 2 ? jj : jj - static_cast<double>(n)) * dk;
    }
    return k;
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("Grid1D: need at least 2 points");
    if (!(max > min)) throw std::invalid_argument("Grid1D: max must exceed min");
  }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;
};

/// Default grids. The q axis spans 2.5-20.5 bohr with 721 points and the
/// cavity axis -90..90 with 361 points.
inline Grid1D default_q_grid() { return {2.5, 20.5, 721}; }
inline Grid1D default_x_grid() { return {-90.0, 90.0, 361}; }

/// Same q spacing (0.025 bohr) truncated to the bound region of the low
/// vibrational states. The cavity axis is wider than the default (the
/// displaced polar-right states reach |psi| ~ 1e-6 max at x = -90) and
/// coarser (dx = 2, still far below the Nyquist limit of Fock states up to
/// n = 60). Roughly 8x cheaper per step than the default grids.
inline Grid1D compact_q_grid() { return {2.5, 2.5 + 255 * 0.025, 256}; }
inline Grid1D compact_x_grid() { return {-127.0, 127.0, 128}; }

// 64-byte aligned storage so one FFTW plan can be reused on any buffer.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::size_t kAlignment = 64;

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t count) {
    const std::size_t bytes = ((count * sizeof(T) + kAlignment - 1) / kAlignment) * kAlignment;
    void* p = std::aligned_alloc(kAlignment, bytes == 0 ? kAlignment : bytes);
    if (p == nullptr) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexBuffer = std::vector<cplx, AlignedAllocator<cplx>>;

class Wavefunction2D {
 public:
  Wavefunction2D() = default;
  Wavefunction2D(Grid1D q, Grid1D x) : q_(q), x_(x), data_(q.n * x.n, cplx{0.0, 0.0}) {
    q_.validate();
    x_.validate();
  }

  const Grid1D& q_grid() const { return q_; }
  const Grid1D& x_grid() const { return x_; }
  std::size_t nq() const { return q_.n; }
  std::size_t nx() const { return x_.n; }
  std::size_t size() const { return data_.size(); }
  double cell() const { return q_.spacing() * x_.spacing(); }

  cplx& operator()(std::size_t iq, std::size_t ix) { return data_[iq * x_.n + ix]; }
  const cplx& operator()(std::size_t iq, std::size_t ix) const { return data_[iq * x_.n + ix]; }

  std::span<cplx> data() { return data_; }
  std::span<const cplx> data() const { return data_; }
  cplx* raw() { return data_.data(); }
  const cplx* raw() const { return data_.data(); }

  bool same_grid(const Wavefunction2D& other) const {
    return q_ == other.q_ && x_ == other.x_;
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& c : data_) s += std::norm(c);
    return s * cell();
  }

  void normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2)) {
      throw std::runtime_error("Wavefunction2D::normalize: zero or non-finite norm");
    }
    scale(1.0 / std::sqrt(n2));
  }

  void scale(cplx s) {
    for (auto& c : data_) c *= s;
  }

  /// Adds `s * other` in place.
  void axpy(cplx s, const Wavefunction2D& other) {
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const cplx& c) {
      return std::isfinite(c.real()) && std::isfinite(c.imag());
    });
  }

  /// Largest |psi| on the outer frame of the grid divided by the global max.
  double edge_ratio() const {
    double peak = 0.0;
    for (const auto& c : data_) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) return 0.0;
    double edge = 0.0;
    const std::size_t nq = q_.n, nx = x_.n;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      edge = std::max({edge, std::abs((*this)(0, ix)), std::abs((*this)(nq - 1, ix))});
    }
    for (std::size_t iq = 0; iq < nq; ++iq) {
      edge = std::max({edge, std::abs((*this)(iq, 0)), std::abs((*this)(iq, nx - 1))});
    }
    return edge / peak;
  }

  /// Samples f(q, x) on the grid.
  template <class F>
  static Wavefunction2D from_function(Grid1D q, Grid1D x, F&& f) {
    Wavefunction2D psi(q, x);
    for (std::size_t iq = 0; iq < q.n; ++iq) {
      const double qv = q.point(iq);
      for (std::size_t ix = 0; ix < x.n; ++ix) psi(iq, ix) = f(qv, x.point(ix));
    }
    return psi;
  }

  /// Outer product phi(q) chi(x).
  static Wavefunction2D product(Grid1D q, Grid1D x, std::span<const double> phi,
                                std::span<const double> chi) {
    if (phi.size() != q.n || chi.size() != x.n) {
      throw std::invalid_argument("Wavefunction2D::product: factor size mismatch");
    }
    Wavefunction2D psi(q, x);
    for (std::size_t iq = 0; iq < q.n; ++iq)
      for (std::size_t ix = 0; ix < x.n; ++ix) psi(iq, ix) = phi[iq] * chi[ix];
    return psi;
  }

 private:
  Grid1D q_{};
  Grid1D x_{};
  ComplexBuffer data_;
};

inline void require_same_grid(const Wavefunction2D& a, const Wavefunction2D& b, const char* who) {
  if (!a.same_grid(b)) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

/// <a|b> = sum conj(a) b dq dx.
inline cplx inner_product(const Wavefunction2D& a, const Wavefunction2D& b) {
  require_same_grid(a, b, "inner_product");
  cplx s{0.0, 0.0};
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) s += std::conj(da[i]) * db[i];
  return s * a.cell();
}

struct Expectation {
  double value = 0.0;
  double imag_residue = 0.0;  // health check: should vanish for real f
};

/// <psi| f(q, x) |psi> with the Riemann measure dq dx.
template <class F>
Expectation expectation(const Wavefunction2D& psi, F&& f) {
  const auto& qg = psi.q_grid();
  const auto& xg = psi.x_grid();
  cplx s{0.0, 0.0};
  for (std::size_t iq = 0; iq < qg.n; ++iq) {
    const double q = qg.point(iq);
    for (std::size_t ix = 0; ix < xg.n; ++ix) {
      const double fv = f(q, xg.point(ix));
      if (!std::isfinite(fv)) {
        throw std::invalid_argument("expectation: observable is not finite on the grid");
      }
      const cplx& c = psi(iq, ix);
      s += std::conj(c) * fv * c;
    }
  }
  s *= psi.cell();
  return {s.real(), s.imag()};
}

/// exp(-i * phase(q, x) * dt) applied pointwise.
template <class F>
void apply_diagonal_phase(Wavefunction2D& psi, F&& phase, double dt) {
  const auto& qg = psi.q_grid();
  const auto& xg = psi.x_grid();
  for (std::size_t iq = 0; iq < qg.n; ++iq) {
    const double q = qg.point(iq);
    for (std::size_t ix = 0; ix < xg.n; ++ix) {
      const double a = phase(q, xg.point(ix)) * dt;
      psi(iq, ix) *= cplx{std::cos(a), -std::sin(a)};
    }
  }
}

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

// RAII pair of in-place 2D FFTW plans for one grid shape. Plans are made with
// FFTW_ESTIMATE so the chosen algorithm, and therefore every trajectory, is
// reproducible run to run.
class FourierTransform2D {
 public:
  FourierTransform2D(std::size_t nq, std::size_t nx) : nq_(nq), nx_(nx) {
    ComplexBuffer scratch(nq * nx);
    auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_2d(static_cast<int>(nq), static_cast<int>(nx), p, p, FFTW_FORWARD,
                                FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(static_cast<int>(nq), static_cast<int>(nx), p, p, FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw std::runtime_error("FourierTransform2D: FFTW planning failed");
    }
  }
  explicit FourierTransform2D(const Wavefunction2D& like) : FourierTransform2D(like.nq(), like.nx()) {}

  FourierTransform2D(const FourierTransform2D&) = delete;
  FourierTransform2D& operator=(const FourierTransform2D&) = delete;
  FourierTransform2D(FourierTransform2D&& o) noexcept
      : nq_(o.nq_), nx_(o.nx_), forward_(o.forward_), backward_(o.backward_) {
    o.forward_ = nullptr;
    o.backward_ = nullptr;
  }
  FourierTransform2D& operator=(FourierTransform2D&&) = delete;

  ~FourierTransform2D() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }

  // Unnormalized forward transform.
  void forward(cplx* data) const { execute(forward_, data); }
  // Backward transform including the 1/N factor.
  void backward(cplx* data) const {
    execute(backward_, data);
    const double s = 1.0 / static_cast<double>(nq_ * nx_);
    for (std::size_t i = 0; i < nq_ * nx_; ++i) data[i] *= s;
  }
  // Backward transform without normalization (fold 1/N into a phase table).
  void backward_unscaled(cplx* data) const { execute(backward_, data); }

  std::size_t nq() const { return nq_; }
  std::size_t nx() const { return nx_; }

 private:
  static void execute(fftw_plan plan, cplx* data) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(plan, p, p);
  }

  std::size_t nq_;
  std::size_t nx_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

enum class Axis { Q, X };

struct MomentumStats {
  double norm = 0.0;  // momentum-space norm (Parseval check)
  double mean_q = 0.0, mean_q2 = 0.0;
  double mean_x = 0.0, mean_x2 = 0.0;
};

/// First and second momentum moments along both axes from one 2D transform.
inline MomentumStats momentum_stats(const Wavefunction2D& psi, const FourierTransform2D& fft) {
  ComplexBuffer work(psi.data().begin(), psi.data().end());
  fft.forward(work.data());
  const auto kq = psi.q_grid().wavenumbers();
  const auto kx = psi.x_grid().wavenumbers();
  const std::size_t nq = psi.nq(), nx = psi.nx();
  // |psi_k|^2 * cell / N is the momentum-space probability.
  const double w = psi.cell() / static_cast<double>(nq * nx);
  MomentumStats m;
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double p = std::norm(work[iq * nx + ix]) * w;
      m.norm += p;
      m.mean_q += p * kq[iq];
      m.mean_q2 += p * kq[iq] * kq[iq];
      m.mean_x += p * kx[ix];
      m.mean_x2 += p * kx[ix] * kx[ix];
    }
  }
  // Nyquist bins carry an ambiguous sign; they are zero for valid states.
  return m;
}

inline MomentumStats momentum_stats(const Wavefunction2D& psi) {
  FourierTransform2D fft(psi);
  return momentum_stats(psi, fft);
}

/// <p> (order 1) or <p^2> (order 2) along one axis.
inline double momentum_moments(const Wavefunction2D& psi, Axis axis, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("momentum_moments: order must be 1 or 2");
  const auto m = momentum_stats(psi);
  if (axis == Axis::Q) return order == 1 ? m.mean_q : m.mean_q2;
  return order == 1 ? m.mean_x : m.mean_x2;
}

/// Returns -i d/d(axis) psi computed spectrally.
inline Wavefunction2D apply_momentum(const Wavefunction2D& psi, Axis axis, const FourierTransform2D& fft) {
  Wavefunction2D out = psi;
  fft.forward(out.raw());
  const std::size_t nq = psi.nq(), nx = psi.nx();
  if (axis == Axis::X) {
    const auto k = psi.x_grid().wavenumbers();
    for (std::size_t iq = 0; iq < nq; ++iq)
      for (std::size_t ix = 0; ix < nx; ++ix) out(iq, ix) *= k[ix];
  } else {
    const auto k = psi.q_grid().wavenumbers();
    for (std::size_t iq = 0; iq < nq; ++iq)
      for (std::size_t ix = 0; ix < nx; ++ix) out(iq, ix) *= k[iq];
  }
  fft.backward(out.raw());
  return out;
}

/// Kinetic energy T = p_q^2/(2 m_q) + p_x^2/(2 m_x) on the FFT grid.
struct KineticTable {
  std::vector<double> tq;  // p_q^2 / (2 m_q)
  std::vector<double> tx;  // p_x^2 / (2 m_x)

  KineticTable(const Grid1D& q, const Grid1D& x, double mass_q, double mass_x) {
    const auto kq = q.wavenumbers();
    const auto kx = x.wavenumbers();
    tq.resize(kq.size());
    tx.resize(kx.size());
    for (std::size_t i = 0; i < kq.size(); ++i) tq[i] = kq[i] * kq[i] / (2.0 * mass_q);
    for (std::size_t i = 0; i < kx.size(); ++i) tx[i] = kx[i] * kx[i] / (2.0 * mass_x);
  }
};

/// Exact free evolution exp(-i T dt) via forward/backward transforms.
inline void apply_kinetic_phase(Wavefunction2D& psi, double dt, double mass_q, double mass_x,
                                const FourierTransform2D& fft) {
  const KineticTable t(psi.q_grid(), psi.x_grid(), mass_q, mass_x);
  fft.forward(psi.raw());
  const std::size_t nq = psi.nq(), nx = psi.nx();
  for (std::size_t iq = 0; iq < nq; ++iq) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double a = (t.tq[iq] + t.tx[ix]) * dt;
      psi(iq, ix) *= cplx{std::cos(a), -std::sin(a)};
    }
  }
  fft.backward(psi.raw());
}

inline void apply_kinetic_phase(Wavefunction2D& psi, double dt, double mass_q, double mass_x) {
  FourierTransform2D fft(psi);
  apply_kinetic_phase(psi, dt, mass_q, mass_x, fft);
}

}  // namespace vibpol
