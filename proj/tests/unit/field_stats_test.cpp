#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace vibpol;
using vibpol::testing::with_cavity_state;

namespace {

constexpr double kOmega = 0.00838;

FieldStatistics stats_of(const Wavefunction2D& psi, double omega = kOmega) {
  FourierTransform2D fft(psi);
  return field_statistics(0.0, omega, psi, psi, FockBasisSpec{omega, 60, FockFrame::Static}, omega, fft);
}

}  // namespace

TEST(FieldStats, VacuumHasUnitQuadraturesAndUndefinedQ) {
  const auto psi = with_cavity_state(compact_q_grid(), compact_x_grid(), [](double x) {
    return std::exp(-0.5 * kOmega * x * x);
  });
  const auto s = stats_of(psi);
  EXPECT_LT(s.mean_n, 1e-8);
  EXPECT_FALSE(s.q_defined());
  EXPECT_FALSE(mandel_q(s.p_of_n).has_value());
  EXPECT_NEAR(s.var_x, 1.0, 1e-6);
  EXPECT_NEAR(s.var_y, 1.0, 1e-6);
  EXPECT_NEAR(s.zeta_0, 0.0, 1e-5);
  EXPECT_NEAR(s.capture, 1.0, 1e-10);
}

TEST(FieldStats, CoherentStateIsPoissonian) {
  const double x0 = 20.0;
  const auto psi = with_cavity_state(compact_q_grid(), compact_x_grid(), [&](double x) {
    return std::exp(-0.5 * kOmega * (x - x0) * (x - x0));
  });
  const auto s = stats_of(psi);
  const double nbar = 0.5 * kOmega * x0 * x0;
  EXPECT_NEAR(s.mean_n, nbar, 1e-8);
  EXPECT_NEAR(s.mandel_q, 0.0, 1e-8);
  for (std::size_t n = 0; n < 8; ++n)
    EXPECT_NEAR(s.p_of_n[n], std::exp(-nbar) * std::pow(nbar, n) / std::tgamma(n + 1.0), 1e-10);
  EXPECT_NEAR(s.var_x, 1.0, 1e-8);
  EXPECT_NEAR(s.var_y, 1.0, 1e-8);
  EXPECT_LT(s.crosscheck, 1e-10);
}

TEST(FieldStats, SqueezedVacuumVariances) {
  const double r = 0.4;
  const double sigma2 = std::exp(-2 * r) / (2 * kOmega);
  const auto psi = with_cavity_state(compact_q_grid(), compact_x_grid(), [&](double x) {
    return std::exp(-x * x / (4 * sigma2));
  });
  const auto s = stats_of(psi);
  EXPECT_NEAR(s.var_x, std::exp(-2 * r), 1e-8);
  EXPECT_NEAR(s.var_y, std::exp(2 * r), 1e-8);
  EXPECT_NEAR(s.zeta_0, 20 * r / std::numbers::ln10, 1e-6);
  EXPECT_NEAR(s.mean_n, std::sinh(r) * std::sinh(r), 1e-8);
  EXPECT_NEAR(s.heisenberg_product(), 1.0, 1e-8);
  // Squeezed vacuum has only even photon numbers.
  EXPECT_LT(s.p_of_n[1] + s.p_of_n[3], 1e-12);
}

TEST(FieldStats, FockStateIsMaximallySubPoissonian) {
  const auto chi = hermite_functions(compact_x_grid(), kOmega, 3);
  const Grid1D xg = compact_x_grid();
  const auto psi = with_cavity_state(compact_q_grid(), xg, [&](double x) {
    return chi[3][static_cast<std::size_t>(std::lround((x - xg.min) / xg.spacing()))];
  });
  const auto s = stats_of(psi);
  EXPECT_NEAR(s.p_of_n[3], 1.0, 1e-10);
  EXPECT_NEAR(s.mandel_q, -1.0, 1e-8);
  EXPECT_NEAR(s.var_x, 7.0, 1e-8);
}

TEST(FieldStats, RotatedQuadratureAndCovariance) {
  QuadratureMoments q;
  q.var_x = 0.5;
  q.var_y = 2.0;
  q.cov = 0.1;
  EXPECT_DOUBLE_EQ(q.variance(0.0), 0.5);
  EXPECT_NEAR(q.variance(std::numbers::pi / 2), 2.0, 1e-12);
  EXPECT_NEAR(q.variance(std::numbers::pi / 4), 0.5 * (0.5 + 2.0) + 0.1, 1e-12);
}

TEST(FieldStats, HermiteFunctionsOrthonormal) {
  const Grid1D x = compact_x_grid();
  const auto chi = hermite_functions(x, kOmega, 40);
  for (std::size_t m = 0; m <= 40; m += 5)
    for (std::size_t n = 0; n <= 40; n += 4) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.n; ++i) s += chi[m][i] * chi[n][i];
      EXPECT_NEAR(s * x.spacing(), m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
}

TEST(FieldStats, Errors) {
  EXPECT_THROW(squeezing_db(0.0), std::invalid_argument);
  EXPECT_THROW(squeezing_db(-1.0), std::invalid_argument);
  EXPECT_THROW(parse_fock_frame("lab"), std::invalid_argument);
  const auto m = number_moments({0.5, 0.5});
  EXPECT_DOUBLE_EQ(m.mean, 0.5);
  EXPECT_DOUBLE_EQ(m.variance, 0.25);
}
