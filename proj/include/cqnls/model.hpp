#pragma once
#include "cqnls/field.hpp"
#include "cqnls/multipliers.hpp"

namespace cqnls {

// raw coefficients of (i d/dt + Laplacian) psi = a1 psi - a3 |psi|^2 psi + a5 |psi|^4 psi
struct RawParams {
  double alpha1 = 0, alpha3 = 0, alpha5 = 0;
};

// Rescaled form (i d/dt + Laplacian) phi = (|phi|^2 - 1)(beta (|phi|^2 - 1) + 1) phi
// reached via psi(t, x) = amplitude_scale * phi(time_scale * t, space_scale * x).
struct NormalizedParams {
  double beta = 0;
  double amplitude_scale = 1;  // c, with c^2 the stable zero of a1 - a3 x + a5 x^2
  double time_scale = 1;       // c^2 p'(c^2)
  double space_scale = 1;      // sqrt(time_scale)
};

// Picks the stable positive equilibrium (p(c^2) = 0 with p'(c^2) > 0).
// Throws NoStableEquilibriumError / DegenerateRootError as appropriate.
NormalizedParams normalize(const RawParams& raw);

// full nonlinearity N(u) of the equation for u = psi - 1:
//   (i d/dt + Laplacian) u = 2 Re u + N(u)
Field nonlinearity_N(const Field& u, double beta);
// homogeneous part of polynomial degree k (k = 2..5); their sum is N(u)
Field nonlinearity_N_part(const Field& u, double beta, int k);

// right-hand side in the diagonalizing variable: N_v(u) = U Re N(u) + i Im N(u)
Field nv_of_u(const Field& u, double beta);
CoeffField nv_hat_of_u(const Field& u, double beta, bool dealias_rhs = false);

// diagonalizing map v = Re u + i U Im u.  U kills the mean of Im u, so that
// scalar is carried alongside v and restored on inversion.
struct VState {
  Field v;
  double u2_mean = 0;
};
VState v_from_u(const Field& u);
Field u_from_v(const Field& v, double u2_mean);

// companion scalar ODE for the mean of Im u:
//   d/dt mean(Im u) = -2 mean(Re u) - mean(Re N(u))
double u2_mean_rhs(const Field& u, double beta);

// conserved energy of the full field psi:
//   int 1/2 |grad psi|^2 + 1/4 (|psi|^2-1)^2 + beta/6 (|psi|^2-1)^3 dx
double energy(const Field& psi, double beta);

}  // namespace cqnls
