#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "vibpol/grid.hpp"

using namespace vibpol;

namespace {

Grid1D q_small() { return {-20.0, 20.0, 128}; }
Grid1D x_small() { return {-30.0, 30.0, 96}; }

Wavefunction2D gaussian(double sq, double sx, double q0 = 0.0, double kx = 0.0) {
  auto psi = Wavefunction2D::from_function(q_small(), x_small(), [&](double q, double x) {
    return std::exp(-(q - q0) * (q - q0) / (4 * sq * sq) - x * x / (4 * sx * sx)) * std::polar(1.0, kx * x);
  });
  psi.normalize();
  return psi;
}

}  // namespace

TEST(Grid, SpacingAndWavenumbers) {
  const Grid1D g{0.0, 9.0, 10};
  EXPECT_DOUBLE_EQ(g.spacing(), 1.0);
  EXPECT_DOUBLE_EQ(g.period(), 10.0);
  const auto k = g.wavenumbers();
  EXPECT_DOUBLE_EQ(k[1], 2 * std::numbers::pi / 10.0);
  EXPECT_DOUBLE_EQ(k[9], -2 * std::numbers::pi / 10.0);
  EXPECT_THROW((Grid1D{1.0, 0.0, 10}.validate()), std::invalid_argument);
  EXPECT_THROW((Grid1D{0.0, 1.0, 1}.validate()), std::invalid_argument);
}

TEST(Grid, GaussianPositionMoments) {
  const auto psi = gaussian(1.5, 2.0, 3.0);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-12);
  const auto mq = expectation(psi, [](double q, double) { return q; });
  const auto vx = expectation(psi, [](double, double x) { return x * x; });
  EXPECT_NEAR(mq.value, 3.0, 1e-10);
  EXPECT_NEAR(vx.value, 4.0, 1e-10);
  EXPECT_LT(std::abs(mq.imag_residue), 1e-10);
}

TEST(Grid, GaussianMomentumMomentsAndParseval) {
  const auto psi = gaussian(1.5, 2.0, 0.0, 0.7);
  const auto m = momentum_stats(psi);
  EXPECT_NEAR(m.norm, 1.0, 1e-12);
  EXPECT_NEAR(m.mean_x, 0.7, 1e-10);
  EXPECT_NEAR(m.mean_x2 - m.mean_x * m.mean_x, 1.0 / (4 * 4.0), 1e-10);
  EXPECT_NEAR(m.mean_q2, 1.0 / (4 * 1.5 * 1.5), 1e-10);
  EXPECT_NEAR(momentum_moments(psi, Axis::X, 1), 0.7, 1e-10);
  EXPECT_THROW(momentum_moments(psi, Axis::X, 3), std::invalid_argument);
}

TEST(Grid, SpectralSecondDerivativeOfSine) {
  const Grid1D q{0.0, 1.0, 4};
  const Grid1D x{0.0, 63.0, 64};  // period 64
  const double k = 2 * std::numbers::pi * 5 / 64.0;
  auto psi = Wavefunction2D::from_function(q, x, [&](double, double xv) { return std::sin(k * xv); });
  FourierTransform2D fft(psi);
  const auto d2 = apply_momentum(apply_momentum(psi, Axis::X, fft), Axis::X, fft);  // -d^2/dx^2
  for (std::size_t ix = 0; ix < x.n; ++ix) EXPECT_NEAR(d2(1, ix).real(), k * k * std::sin(k * x.point(ix)), 1e-10);
}

TEST(Grid, FreeGaussianSpreading) {
  auto psi = gaussian(1.0, 1.5);
  const double t = 3.0, mq = 2.0, mx = 1.0;
  apply_kinetic_phase(psi, t, mq, mx);
  EXPECT_NEAR(psi.norm_squared(), 1.0, 1e-12);
  auto width = [&](double s0, double m) { return s0 * s0 * (1 + std::pow(t / (2 * m * s0 * s0), 2)); };
  EXPECT_NEAR(expectation(psi, [](double q, double) { return q * q; }).value, width(1.0, mq), 1e-8);
  EXPECT_NEAR(expectation(psi, [](double, double x) { return x * x; }).value, width(1.5, mx), 1e-8);
}

TEST(Grid, InnerProductAndErrors) {
  const auto a = gaussian(1.0, 1.0);
  EXPECT_NEAR(std::abs(inner_product(a, a)), 1.0, 1e-12);
  Wavefunction2D other(Grid1D{-20.0, 20.0, 64}, x_small());
  EXPECT_THROW(inner_product(a, other), std::invalid_argument);
  Wavefunction2D zero(q_small(), x_small());
  EXPECT_THROW(zero.normalize(), std::runtime_error);
  EXPECT_THROW(expectation(a, [](double, double) { return std::nan(""); }), std::invalid_argument);
}

TEST(Grid, EdgeRatio) {
  EXPECT_LT(gaussian(1.0, 1.0).edge_ratio(), 1e-12);
  EXPECT_GT(gaussian(1.0, 15.0).edge_ratio(), 1e-3);
}
