#pragma once
#include <array>
#include <cstdint>
#include <vector>

#include "cqnls/errors.hpp"

namespace cqnls {

// Periodic box [-L/2, L/2)^d sampled on m points per axis (m a power of two).
// Fourier modes carry frequencies xi = (2*pi/L) * k with integer k in
// [-m/2, m/2), stored in standard FFT order (k = 0,1,...,m/2-1,-m/2,...,-1).
struct Grid {
  int d = 3;
  int m = 64;
  double L = 64.0;

  Grid(int d_, int m_, double L_);

  std::size_t size() const { return n_total; }
  double h() const { return L / m; }          // mesh width
  double dxi() const { return two_pi / L; }   // frequency spacing
  double cell_volume() const;                 // h^d
  double xi_max() const { return dxi() * (m / 2); }

  // integer mode index along one axis from flat storage index
  int k_of(int idx1d) const { return idx1d < m / 2 ? idx1d : idx1d - m; }
  // physical coordinate along one axis
  double x_of(int idx1d) const { return -L / 2 + idx1d * h(); }

  // decompose a flat index into per-axis indices (row-major, axis 0 slowest)
  std::array<int, 3> unflatten(std::size_t idx) const;

  // frequency vector of a flat coefficient index (zero-padded above d)
  std::array<double, 3> xi(std::size_t idx) const;
  double xi_norm(std::size_t idx) const;

  // physical coordinates of a flat sample index
  std::array<double, 3> x(std::size_t idx) const;

  bool operator==(const Grid& o) const { return d == o.d && m == o.m && L == o.L; }

  std::size_t n_total = 0;
  static constexpr double two_pi = 6.283185307179586476925286766559;
};

}  // namespace cqnls
