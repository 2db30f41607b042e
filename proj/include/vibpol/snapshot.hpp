#pragma once

// Binary wavefunction snapshots.
//
// Layout (all little-endian):
//   char[8]   magic "VIBPOLWF"
//   uint32    version (1)
//   uint32    reserved (0)
//   float64   q_min, q_max;  uint64 q_n
//   float64   x_min, x_max;  uint64 x_n
//   float64   t_fs, omega_c_t, omega_c0      (hartree)
//   float64[2 * q_n * x_n]  (re, im) pairs, row-major with q slow

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "vibpol/grid.hpp"

namespace vibpol {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

struct Snapshot {
  double t_fs = 0.0;
  double omega_c_t = 0.0;
  double omega_c0 = 0.0;
  Wavefunction2D psi;
};

inline constexpr std::array<char, 8> kSnapshotMagic{'V', 'I', 'B', 'P', 'O', 'L', 'W', 'F'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

namespace detail {
template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("snapshot: truncated header");
  return v;
}
}  // namespace detail

inline void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path.string() + " for writing");
  os.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  detail::put<std::uint32_t>(os, kSnapshotVersion);
  detail::put<std::uint32_t>(os, 0);
  for (const Grid1D* g : {&s.psi.q_grid(), &s.psi.x_grid()}) {
    detail::put<double>(os, g->min);
    detail::put<double>(os, g->max);
    detail::put<std::uint64_t>(os, g->n);
  }
  detail::put<double>(os, s.t_fs);
  detail::put<double>(os, s.omega_c_t);
  detail::put<double>(os, s.omega_c0);
  os.write(reinterpret_cast<const char*>(s.psi.raw()),
           static_cast<std::streamsize>(s.psi.size() * sizeof(cplx)));
  if (!os) throw std::runtime_error("snapshot: write failed for " + path.string());
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path.string());
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kSnapshotMagic) throw std::runtime_error("snapshot: bad magic in " + path.string());
  const auto version = detail::get<std::uint32_t>(is);
  if (version != kSnapshotVersion) {
    throw std::runtime_error("snapshot: unsupported version " + std::to_string(version));
  }
  (void)detail::get<std::uint32_t>(is);
  Grid1D g[2];
  for (auto& gi : g) {
    gi.min = detail::get<double>(is);
    gi.max = detail::get<double>(is);
    gi.n = static_cast<std::size_t>(detail::get<std::uint64_t>(is));
    gi.validate();
  }
  Snapshot s;
  s.t_fs = detail::get<double>(is);
  s.omega_c_t = detail::get<double>(is);
  s.omega_c0 = detail::get<double>(is);
  s.psi = Wavefunction2D(g[0], g[1]);
  is.read(reinterpret_cast<char*>(s.psi.raw()), static_cast<std::streamsize>(s.psi.size() * sizeof(cplx)));
  if (!is) throw std::runtime_error("snapshot: truncated amplitude block in " + path.string());
  return s;
}

}  // namespace vibpol
