#include "cqnls/multipliers.hpp"

#include <cmath>

namespace cqnls {

double sym_h(double r) { return r * std::sqrt(2 + r * r); }
double sym_hp(double r) { return (2 + 2 * r * r) / std::sqrt(2 + r * r); }
double sym_hpp(double r) { return 2 * r * (3 + r * r) / std::pow(2 + r * r, 1.5); }
double sym_hppp(double r) { return 12.0 / std::pow(2 + r * r, 2.5); }
double sym_hpppp(double r) { return -60.0 * r / std::pow(2 + r * r, 3.5); }
double sym_bracket(double r) { return std::sqrt(2 + r * r); }
double sym_U(double r) { return r / std::sqrt(2 + r * r); }
double sym_Uinv(double r) { return std::sqrt(2 + r * r) / r; }

CoeffField apply_radial_multiplier(const CoeffField& c,
                                   const std::function<double(double)>& sym,
                                   double zero_mode) {
  return apply_radial_multiplier_c(
      c, [&sym](double r) { return cplx(sym(r), 0); }, cplx(zero_mode, 0));
}

CoeffField apply_radial_multiplier_c(const CoeffField& c,
                                     const std::function<cplx(double)>& sym,
                                     cplx zero_mode) {
  CoeffField out(c.grid);
  for (std::size_t i = 0; i < c.size(); ++i) {
    cplx m = (i == 0) ? zero_mode : sym(c.grid.xi_norm(i));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw SymbolSingularityError("radial multiplier: non-finite symbol value");
    out.c[i] = m * c.c[i];
  }
  return out;
}

CoeffField apply_xi_multiplier(const CoeffField& c,
                               const std::function<cplx(const std::array<double, 3>&)>& sym) {
  CoeffField out(c.grid);
  for (std::size_t i = 0; i < c.size(); ++i) {
    cplx m = sym(c.grid.xi(i));
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag()))
      throw SymbolSingularityError("xi multiplier: non-finite symbol value");
    out.c[i] = m * c.c[i];
  }
  return out;
}

CoeffField op_H(const CoeffField& c) { return apply_radial_multiplier(c, sym_h, 0); }
CoeffField op_U(const CoeffField& c) { return apply_radial_multiplier(c, sym_U, 0); }

CoeffField op_Uinv(const CoeffField& c, double zero_tol) {
  double scale = 0;
  for (const auto& z : c.c) scale = std::max(scale, std::abs(z));
  if (std::abs(c.c[0]) > zero_tol * std::max(scale, 1e-300))
    throw SymbolSingularityError("U^{-1}: input carries a nonzero spatial mean");
  return apply_radial_multiplier(c, sym_Uinv, 0);
}

CoeffField op_bracket(const CoeffField& c) {
  return apply_radial_multiplier(c, sym_bracket, std::sqrt(2.0));
}

CoeffField op_modgrad_pow(const CoeffField& c, double s) {
  if (s < 0 && std::abs(c.c[0]) != 0)
    throw SymbolSingularityError("|nabla|^s with s<0 needs a vanishing zero mode");
  return apply_radial_multiplier(c, [s](double r) { return std::pow(r, s); }, 0);
}

CoeffField op_propagator(const CoeffField& c, double t) {
  return apply_radial_multiplier_c(
      c, [t](double r) { return std::exp(cplx(0, -t * sym_h(r))); }, cplx(1, 0));
}

CoeffField op_free_schrodinger(const CoeffField& c, double t) {
  return apply_radial_multiplier_c(
      c, [t](double r) { return std::exp(cplx(0, -t * r * r)); }, cplx(1, 0));
}

CoeffField op_derivative(const CoeffField& c, int axis) {
  return apply_xi_multiplier(
      c, [axis](const std::array<double, 3>& xi) { return cplx(0, xi[axis]); });
}

double lp_sigma(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

double lp_smooth_step(double s) {
  if (s <= 0) return 0;
  if (s >= 1) return 1;
  double a = lp_sigma(s), b = lp_sigma(1 - s);
  return a / (a + b);
}

double lp_phi(double r) { return lp_smooth_step((1.1 - r) * 10.0); }
double lp_psi(double r) { return lp_phi(r) - lp_phi(2 * r); }
double lp_psi_fat(double r) { return lp_psi(2 * r) + lp_psi(r) + lp_psi(r / 2); }

CoeffField lp_project(const CoeffField& c, LPKind kind, double N) {
  if (!(N > 0)) throw Error("lp_project: N must be positive");
  auto bump = [kind](double s) {
    switch (kind) {
      case LPKind::leq: return lp_phi(s);
      case LPKind::at: return lp_psi(s);
      case LPKind::fat_at: return lp_psi_fat(s);
      case LPKind::gt: return 1.0 - lp_phi(s);
    }
    return 0.0;
  };
  double z = bump(0.0);
  return apply_radial_multiplier(c, [&](double r) { return bump(r / N); }, z);
}

Field lp_project(const Field& f, LPKind kind, double N) {
  return to_field(lp_project(to_coeff(f), kind, N));
}

Field multiply_by_x(const Field& f, int axis) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.grid.x(i)[axis] * f.v[i];
  return out;
}

Field angular_momentum(const Field& f, int axis_j, int axis_k) {
  auto c = to_coeff(f);
  Field dk = to_field(op_derivative(c, axis_k));
  Field dj = to_field(op_derivative(c, axis_j));
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto x = f.grid.x(i);
    out.v[i] = x[axis_j] * dk.v[i] - x[axis_k] * dj.v[i];
  }
  return out;
}

CoeffField dealias(const CoeffField& c) {
  CoeffField out(c.grid);
  const int kmax = c.grid.m / 3;
  for (std::size_t i = 0; i < c.size(); ++i) {
    auto ka = c.grid.unflatten(i);
    bool keep = true;
    for (int a = 0; a < c.grid.d; ++a)
      if (std::abs(c.grid.k_of(ka[a])) > kmax) keep = false;
    out.c[i] = keep ? c.c[i] : cplx(0, 0);
  }
  return out;
}

double boundary_mass_fraction(const Field& f, double margin) {
  if (margin < 0) margin = f.grid.L / 8;
  double total = 0, near = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double a = std::norm(f.v[i]);
    total += a;
    auto x = f.grid.x(i);
    bool close = false;
    for (int ax = 0; ax < f.grid.d; ++ax)
      if (f.grid.L / 2 - std::abs(x[ax]) <= margin) close = true;
    if (close) near += a;
  }
  return total > 0 ? near / total : 0.0;
}

}  // namespace cqnls
