#pragma once
#include <string>
#include <vector>

#include "cqnls/bilinear.hpp"

namespace cqnls {

// quadratic interaction phases on the xi = xi1 + xi2 plane
enum class PhaseType { conj2, plain2, mixed };

double phase(PhaseType t, const V3& xi1, const V3& xi2);
V3 grad_H(const V3& xi);                                  // h'(|xi|) xi/|xi|
V3 grad_xi_phase(PhaseType t, const V3& xi1, const V3& xi2);   // d/dxi at fixed xi2
V3 grad_xi2_phase(PhaseType t, const V3& xi1, const V3& xi2);  // d/dxi2 at fixed xi

// angle between two vectors, robust near 0 and pi
double angle3(const V3& a, const V3& b);
// component of xi orthogonal to xi2
V3 perp_component(const V3& xi, const V3& xi2);

struct AtlasConfig {
  double beta = 2.0;        // enters the quadratic coefficient symbol
  double mixed_C = 16.0;    // frequency split between mid/low bands (power of two,
                            // see calibrate_mixed_C)
  double angle_sep = 0.05;  // transition width for O(1) angular thresholds
  double cone_frac = 0.5;   // transition fraction for narrow cone thresholds
  double theta_small = 1e-4;  // narrow cone scale constant
  double x_exponent = 0.51;   // the "1/2+" exponent in the space-region claim
  int a_variant = 1;        // 1 or 2: which coefficient symbol feeds multipliers
  int n_support_samples = 20000;
  unsigned long seed = 777;
};

enum class RegionKind { time, space, angular };

struct MultiplierSpec {
  std::string name;
  Symbol2 sym;
  double claimed = 0;  // claimed size comparator (dimensionless, dyad-dependent)
  SupportSpec supp;
  int free_slot = 2;  // input whose Sobolev seminorms enter op{.}
};

struct RegionSpec {
  int index = 0;
  std::string name;
  RegionKind kind = RegionKind::time;
  bool active = true;  // side conditions on (N1, N2)
  std::function<double(const V3&, const V3&)> rho;
  // measured denominator and its claimed pointwise comparator
  std::function<double(const V3&, const V3&)> denom;
  std::function<double(const V3&, const V3&)> denom_bound;
  std::vector<MultiplierSpec> multipliers;
};

struct RegionFamily {
  PhaseType type = PhaseType::conj2;
  double N1 = 1, N2 = 1;
  AtlasConfig cfg;
  std::vector<RegionSpec> regions;
};

RegionFamily build_region_family(PhaseType t, double N1, double N2,
                                 const AtlasConfig& cfg = {});

// max |sum_j rho_j - 1| over quasi-random support samples
double partition_residual(const RegionFamily& fam, int n_samples, unsigned long seed);

struct DenomAudit {
  int region = 0;
  std::string name;
  int n_support = 0;       // samples landing in the region (rho > 0.5)
  double min_denom = 0;    // over those samples
  double min_ratio = 0;    // denom / comparator
  bool positive = true;
};
std::vector<DenomAudit> audit_denominators(const RegionFamily& fam);

struct OpBoundAudit {
  int region = 0;
  std::string name;
  double measured = 0;  // opnorm_estimate value
  double claimed = 0;
  double ratio = 0;     // measured / claimed
  bool empty = false;   // no support mass at this dyad
};
std::vector<OpBoundAudit> audit_multiplier_bounds(const RegionFamily& fam,
                                                  const OpNormConfig& on_cfg = {});

// closed-form h-derivative family against finite differences, plus two-sided
// bands for h^(k) against the comparators <r>, r/<r>, <r>^-5, r <r>^-7
struct HDerivAudit {
  double max_rel_err = 0;  // worst over orders 1..4 and sampled radii
  double ratio_lo[4] = {0, 0, 0, 0};
  double ratio_hi[4] = {0, 0, 0, 0};
};
HDerivAudit h_derivative_audit(int n_samples, double r_lo, double r_hi);

// gradient-difference inequality: |gradH(x) -+ gradH(y)| against
// ||x|-|y|| max(|x|/<x>, |y|/<y>) + min(<x>,<y>) sin(angle(x, +-y)/2)
struct GradDiffAudit {
  double max_ratio = 0;  // LHS / RHS over samples; finiteness is the claim
};
GradDiffAudit grad_h_difference_audit(int n_samples, unsigned long seed);

// smallest power of two C for which the mid-band time-resonance lower bound
// |Phi| >= 0.5 |xi| |xi2| holds on sampled support points
double calibrate_mixed_C(const AtlasConfig& cfg, double N_lo, double N_hi, int n_samples);

}  // namespace cqnls
