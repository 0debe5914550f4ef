#pragma once
#include <functional>
#include <vector>

#include "cqnls/field.hpp"

namespace cqnls {

// radial frequency profile fhat(rho), compactly supported in [rho_lo, rho_hi];
// dimension is fixed to 3
struct RadialProfile {
  std::function<double(double)> fhat;
  double rho_lo = 0, rho_hi = 0;
};

// dyadic bump fhat(rho) = psi(rho/N), supported in [N/2, 1.1 N]
RadialProfile lp_bump_profile(double N);

// u(t, r) = sqrt(2/pi) r^-1 int exp(-i t h(rho)) sin(rho r) fhat(rho) rho drho,
// the 3D radial reduction of the semigroup; unitary for the measure r^2 dr.
// Oscillation-aware panel quadrature, refined by doubling until successive
// passes differ by less than tol (sup over the requested radii).
std::vector<cplx> radial_propagate(const RadialProfile& p, double t,
                                   const std::vector<double>& r, double tol = 1e-8);

// || u(0, .) ||_L1 = int 4 pi r^2 |u(0,r)| dr
double profile_l1(const RadialProfile& p);

struct DecayPoint {
  double t = 0;
  double sup = 0;      // max_r |u(t, r)|
  double r_at = 0;     // radius attaining it
  double claimed = 0;  // min{N^3, N^2/t, sqrt(N) t^-3/2} * ||u(0,.)||_1
};

struct DispersiveAudit {
  double N = 0;
  double l1 = 0;
  std::vector<DecayPoint> points;
  double slope = 0;           // d log sup / d log t over the full window
  double env_ratio_min = 0;   // sup / claimed extremes over the window
  double env_ratio_max = 0;
};

DispersiveAudit dispersive_audit(double N, const std::vector<double>& ts);

// eigenvalues of the Hessian of H at |xi| = r: the radial direction carries
// h''(r), the two tangential directions h'(r)/r
struct HessianEigs {
  double radial = 0;
  double tangential = 0;
};
HessianEigs hessian_eigs(double r);
// oracle: Richardson-extrapolated central-difference 3x3 Hessian of H at
// (r,0,0), diagonalized; returns (largest-gap) radial/tangential pair.
// step <= 0 picks 1e-2 * r
HessianEigs hessian_eigs_fd(double r, double step = 0.0);

}  // namespace cqnls
