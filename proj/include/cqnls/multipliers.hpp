#pragma once
#include <functional>

#include "cqnls/field.hpp"

namespace cqnls {

// scalar dispersion symbols: h(r) = r sqrt(2 + r^2) and relatives
double sym_h(double r);
double sym_hp(double r);     // h'
double sym_hpp(double r);    // h''
double sym_hppp(double r);   // h'''
double sym_hpppp(double r);  // h''''
double sym_bracket(double r);  // sqrt(2 + r^2)
double sym_U(double r);        // r / sqrt(2 + r^2)
double sym_Uinv(double r);     // sqrt(2 + r^2) / r   (singular at r = 0)

// Apply a radial Fourier multiplier m(|xi|); the zero mode is set from
// zero_mode explicitly.  Non-finite symbol values raise SymbolSingularityError.
CoeffField apply_radial_multiplier(const CoeffField& c,
                                   const std::function<double(double)>& sym,
                                   double zero_mode);
CoeffField apply_radial_multiplier_c(const CoeffField& c,
                                     const std::function<cplx(double)>& sym,
                                     cplx zero_mode);
// general anisotropic multiplier m(xi)
CoeffField apply_xi_multiplier(const CoeffField& c,
                               const std::function<cplx(const std::array<double, 3>&)>& sym);

// named operators (field-level convenience wrappers FFT in and out)
CoeffField op_H(const CoeffField& c);          // |nabla| <nabla>, zero mode 0
CoeffField op_U(const CoeffField& c);          // |nabla| / <nabla>, zero mode 0
// U^{-1}; requires a (numerically) vanishing zero mode in the input,
// otherwise raises SymbolSingularityError.  The output zero mode is 0.
CoeffField op_Uinv(const CoeffField& c, double zero_tol = 1e-12);
CoeffField op_bracket(const CoeffField& c);    // sqrt(2 - Laplacian), zero mode sqrt(2)
CoeffField op_modgrad_pow(const CoeffField& c, double s);  // |nabla|^s, zero mode 0 (s>0)
CoeffField op_propagator(const CoeffField& c, double t);   // e^{-i t H}, zero mode 1
CoeffField op_free_schrodinger(const CoeffField& c, double t);  // e^{i t Laplacian}
CoeffField op_derivative(const CoeffField& c, int axis);   // d/dx_axis

// Littlewood-Paley calculus.  Bump functions built from the smooth step
// S(s) = sigma(s) / (sigma(s) + sigma(1-s)), sigma(s) = exp(-1/s) for s > 0:
//   lp_phi    : 1 on |xi| <= 1, 0 on |xi| >= 11/10
//   lp_psi    : lp_phi(r) - lp_phi(2r), supported in 1/2 <= r <= 11/10
//   lp_psi_fat: lp_psi(2r) + lp_psi(r) + lp_psi(r/2), = 1 on supp lp_psi
double lp_sigma(double s);
double lp_smooth_step(double s);  // S; 0 for s <= 0, 1 for s >= 1
double lp_phi(double r);
double lp_psi(double r);
double lp_psi_fat(double r);

enum class LPKind { leq, at, fat_at, gt };
CoeffField lp_project(const CoeffField& c, LPKind kind, double N);
Field lp_project(const Field& f, LPKind kind, double N);

// physical-space coordinate multiplication (centered coordinates)
Field multiply_by_x(const Field& f, int axis);
// rotation generator (x_j d/dx_k - x_k d/dx_j) f
Field angular_momentum(const Field& f, int axis_j, int axis_k);

// 2/3-rule dealiasing: zero coefficients with |k| > m/3 on any axis
CoeffField dealias(const CoeffField& c);

// share of squared L^2 mass carried within `margin` of the box boundary
// (default L/8); used to monitor periodic wrap-around contamination
double boundary_mass_fraction(const Field& f, double margin = -1);

}  // namespace cqnls
