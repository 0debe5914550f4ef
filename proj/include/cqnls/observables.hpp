#pragma once
#include <vector>

#include "cqnls/evolution.hpp"
#include "cqnls/model.hpp"

namespace cqnls {

enum class JForm { conjugation, expanded };

// Galilean-type weight J(t) = e^{-itH} x e^{itH}; the expanded form evaluates
// the equivalent first-order expression x + 2 i t (1 - Lap) <nabla>^{-1} R_axis
// with R the Riesz transform.
Field j_apply(const Field& v, double t, int axis, JForm form);

struct XNormBreakdown {
  double sobolev = 0;   // ||<nabla> v||_2
  double weighted = 0;  // sqrt(sum_axis ||J_axis v||_2^2)
  double angular = 0;   // sqrt(sum_planes ||(x x nabla) v||_2^2)
  double total() const { return sobolev + weighted + angular; }
};
XNormBreakdown x_norm(const Field& v, double t, JForm form = JForm::conjugation);

// running space-time norms: sup_t and trapezoid-in-time L^2_t of the L^6 piece,
// for both v and its rotations
struct StrichartzAccumulator {
  double sup_sobolev = 0;
  double sup_sobolev_ang = 0;
  double int_l6_sq = 0;      // int ||<nabla> v||_6^2 dt
  double int_l6_ang_sq = 0;  // same for the rotated fields
  double last_t = -1;
  double last_l6_sq = 0, last_l6_ang_sq = 0;

  void add(double t, const Field& v);
  double value() const;  // combined norm
};

struct SlopeFit {
  double slope = 0;
  double intercept = 0;  // of log(value) vs log(t)
  double max_residual = 0;
  int n = 0;
};
// least-squares fit of log(value) against log(t) over t in [t_lo, t_hi]
SlopeFit fit_log_slope(const std::vector<double>& t, const std::vector<double>& value,
                       double t_lo, double t_hi);

struct ScatteringReport {
  std::vector<double> s;        // dyadic times s with both s and 2s available
  std::vector<double> defect;   // || e^{2isH} v(2s) - e^{isH} v(s) ||_{H^1}
  double eps_hat = 0;           // fitted rate: defect ~ s^{-eps}
  double lin_residual = 0;      // PDE residual of the reconstructed free wave
};
// snapshots: (t, v(t), u2_mean) from a forward run, t doubling
ScatteringReport scattering_monitor(const std::vector<Snapshot>& snaps);

}  // namespace cqnls
