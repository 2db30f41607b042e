#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "vibpol/grid.hpp"

namespace vibpol {

/// Harmonic-oscillator eigenfunctions chi_n(x) of frequency omega (unit mass)
/// for n = 0..n_max, sampled on `grid`. Row n holds chi_n.
///
/// Uses the normalized three-term recurrence in xi = sqrt(omega) x,
///   chi_{n+1} = sqrt(2/(n+1)) xi chi_n - sqrt(n/(n+1)) chi_{n-1},
/// which never forms H_n(xi) or n! explicitly.
inline std::vector<std::vector<double>> hermite_functions(const Grid1D& grid, double omega,
                                                          std::size_t n_max) {
  std::vector<std::vector<double>> chi(n_max + 1, std::vector<double>(grid.n));
  const double s = std::sqrt(omega);
  const double c0 = std::pow(omega / std::numbers::pi, 0.25);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double xi = s * grid.point(i);
    chi[0][i] = c0 * std::exp(-0.5 * xi * xi);
    if (n_max >= 1) chi[1][i] = std::sqrt(2.0) * xi * chi[0][i];
    for (std::size_t n = 1; n < n_max; ++n) {
      const auto nn = static_cast<double>(n);
      chi[n + 1][i] = std::sqrt(2.0 / (nn + 1.0)) * xi * chi[n][i] -
                      std::sqrt(nn / (nn + 1.0)) * chi[n - 1][i];
    }
  }
  return chi;
}

inline std::vector<double> hermite_function(const Grid1D& grid, double omega, std::size_t n) {
  return hermite_functions(grid, omega, n)[n];
}

}  // namespace vibpol
