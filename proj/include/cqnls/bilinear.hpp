#pragma once
#include <array>
#include <functional>

#include "cqnls/field.hpp"

namespace cqnls {

using V3 = std::array<double, 3>;

inline double dot3(const V3& a, const V3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm3(const V3& a) { return std::sqrt(dot3(a, a)); }
inline V3 add3(const V3& a, const V3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline V3 sub3(const V3& a, const V3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline V3 scale3(double s, const V3& a) { return {s * a[0], s * a[1], s * a[2]}; }

// real (possibly vector-valued) symbol b(xi1, xi2)
struct Symbol2 {
  int ncomp = 1;
  std::function<void(const V3& xi1, const V3& xi2, double* out)> eval;

  static Symbol2 scalar(std::function<double(const V3&, const V3&)> f) {
    Symbol2 s;
    s.ncomp = 1;
    s.eval = [f = std::move(f)](const V3& a, const V3& b, double* out) { out[0] = f(a, b); };
    return s;
  }
};

// B[f, g] via the truncated coefficient double sum
//   (B[f,g])^(k) = sum_{k1 + k2 = k} b(xi_{k1}, xi_{k2}) fhat(k1) ghat(k2)
// Inputs must be band-limited to integer modes |k_a| <= K_cap per axis
// (relative spill above 1e-12 of the L2 mass raises BandCapExceededError).
Field apply_bilinear(const Field& f, const Field& g,
                     const std::function<double(const V3&, const V3&)>& b, int K_cap);
CoeffField apply_bilinear(const CoeffField& f, const CoeffField& g,
                          const std::function<double(const V3&, const V3&)>& b, int K_cap);

// ---- operator-size functional ----------------------------------------------
// Estimates  min over input orderings of
//     sqrt( sup_xi ||b||_{Hdot^1} * sup_xi ||b||_{Hdot^2} ),
// seminorms taken in the free input variable at fixed output frequency xi.
// Derivatives by Richardson-extrapolated central differences; integrals by
// tensor quadrature in polar coordinates around the xi axis (the integrands
// are rotation invariant).

struct AngularFeature {
  double pos = 0;    // angle (radians) where the symbol has fine structure
  double width = 0;  // scale of that structure
};

struct OpNormConfig {
  int n_xi = 9;              // |xi| samples for the outer sup
  double xi_lo = -1;         // |xi| sample range; negatives mean "derive from support"
  double xi_hi = -1;
  int n_base_r = 48;         // base panels in radius
  int n_base_theta = 64;     // base panels in angle
  double fd_h_rel = 2e-3;    // finite-difference step relative to local scale
  double delta_excl = 1e-3;  // radius excluded around symbol singular points
  double tail_tol = 1e-3;    // boundary/interior magnitude ratio before
                             // NonCompactSupportError; derivative symbols
                             // carry an extra 1/width^2 factor at the cutoff
                             // edge, so their clean tails sit near 1e-4
  bool check_tail = true;
  int force_ordering = -1;   // -1: min over orderings; 0/1: pin free var
};

struct SupportSpec {
  double r1_lo = 0, r1_hi = 0;  // radial support of xi1
  double r2_lo = 0, r2_hi = 0;  // radial support of xi2
  std::vector<AngularFeature> theta_features;  // in the polar angle of the free var
  std::vector<double> radial_features;         // radii with fine structure
  double radial_feature_width = 0;
  bool singular_at_zero1 = false;  // exclude |xi1| < delta_excl
  bool singular_at_zero2 = false;
};

struct OpNormResult {
  double value = 0;
  double h1_sup[2] = {0, 0};  // per ordering (free var = xi1 / xi2)
  double h2_sup[2] = {0, 0};
  int ordering = 0;           // which ordering attained the min
  double richardson_gap = 0;  // max relative FD extrapolation defect
  double tail_ratio = 0;      // worst edge/interior magnitude ratio seen
};

OpNormResult opnorm_estimate(const Symbol2& b, const SupportSpec& supp,
                             const OpNormConfig& cfg = {});

// ---- normal-form symbols ----------------------------------------------------
double nf_B(const V3& xi1, const V3& xi2);   // -1 / (2 + |xi1|^2 + |xi2|^2)
double nf_A1(const V3& xi1, const V3& xi2, double beta);
double nf_A2(const V3& xi1, const V3& xi2);  // 0 when either argument vanishes

// symbol-level residual of the cancellation used to remove the quadratic
// imaginary part; identically zero in exact arithmetic
double normal_form_identity_residual(const V3& xi1, const V3& xi2);

// quadratic-and-higher pieces of the transformed equation (i d/dt - H) w.
// k = 2 has two independent evaluation routes (1: operator composition,
// 2: closed bilinear symbols); k = 3..5 include the bilinear corrections fed
// by N_{k-1}; k = 6 is the pure correction term fed by N_5.
Field compute_Nk(const Field& v, double u2_mean, double beta, int k, int route,
                 int K_cap);

}  // namespace cqnls
