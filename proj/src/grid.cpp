#include "cqnls/grid.hpp"

#include <cmath>

namespace cqnls {

static bool power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

Grid::Grid(int d_, int m_, double L_) : d(d_), m(m_), L(L_) {
  if (d < 1 || d > 3) throw Error("grid: dimension must be 1, 2 or 3");
  if (!power_of_two(m)) throw NonPowerOfTwoError("grid: m must be a power of two");
  if (!(L > 0)) throw Error("grid: box size must be positive");
  n_total = 1;
  for (int a = 0; a < d; ++a) n_total *= static_cast<std::size_t>(m);
}

double Grid::cell_volume() const {
  double v = 1;
  for (int a = 0; a < d; ++a) v *= h();
  return v;
}

std::array<int, 3> Grid::unflatten(std::size_t idx) const {
  std::array<int, 3> out{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    out[a] = static_cast<int>(idx % m);
    idx /= m;
  }
  return out;
}

std::array<double, 3> Grid::xi(std::size_t idx) const {
  auto ka = unflatten(idx);
  std::array<double, 3> out{0, 0, 0};
  for (int a = 0; a < d; ++a) out[a] = dxi() * k_of(ka[a]);
  return out;
}

double Grid::xi_norm(std::size_t idx) const {
  auto v = xi(idx);
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

std::array<double, 3> Grid::x(std::size_t idx) const {
  auto ja = unflatten(idx);
  std::array<double, 3> out{0, 0, 0};
  for (int a = 0; a < d; ++a) out[a] = x_of(ja[a]);
  return out;
}

}  // namespace cqnls
