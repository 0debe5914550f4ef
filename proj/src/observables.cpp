#include "cqnls/observables.hpp"

#include <cmath>

namespace cqnls {

Field j_apply(const Field& v, double t, int axis, JForm form) {
  if (form == JForm::conjugation) {
    CoeffField back = op_propagator(to_coeff(v), -t);  // e^{+itH} v
    Field xf = multiply_by_x(to_field(back), axis);
    return to_field(op_propagator(to_coeff(xf), t));
  }
  // x v - 2 t (1+|xi|^2) xi_axis / (<xi> |xi|) acting in frequency
  CoeffField c = to_coeff(v);
  CoeffField w = apply_xi_multiplier(c, [t, axis](const std::array<double, 3>& xi) {
    double r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if (r2 == 0) return cplx(0, 0);
    double r = std::sqrt(r2);
    return cplx(-2 * t * (1 + r2) * xi[axis] / (std::sqrt(2 + r2) * r), 0);
  });
  return multiply_by_x(v, axis) + to_field(w);
}

XNormBreakdown x_norm(const Field& v, double t, JForm form) {
  XNormBreakdown out;
  CoeffField c = to_coeff(v);
  out.sobolev = l2_norm(op_bracket(c));
  double w2 = 0;
  for (int a = 0; a < v.grid.d; ++a) {
    double n = l2_norm(j_apply(v, t, a, form));
    w2 += n * n;
  }
  out.weighted = std::sqrt(w2);
  double a2 = 0;
  for (int j = 0; j < v.grid.d; ++j)
    for (int k = j + 1; k < v.grid.d; ++k) {
      double n = l2_norm(angular_momentum(v, j, k));
      a2 += n * n;
    }
  out.angular = std::sqrt(a2);
  return out;
}

void StrichartzAccumulator::add(double t, const Field& v) {
  CoeffField c = to_coeff(v);
  Field bv = to_field(op_bracket(c));
  double s2 = l2_norm(bv);
  sup_sobolev = std::max(sup_sobolev, s2);
  double l6 = lp_norm(bv, 6);
  double l6sq = l6 * l6;

  double ang_sup = 0, ang_l6sq = 0;
  for (int j = 0; j < v.grid.d; ++j)
    for (int k = j + 1; k < v.grid.d; ++k) {
      Field w = to_field(op_bracket(to_coeff(angular_momentum(v, j, k))));
      ang_sup = std::max(ang_sup, l2_norm(w));
      double n6 = lp_norm(w, 6);
      ang_l6sq += n6 * n6;
    }
  sup_sobolev_ang = std::max(sup_sobolev_ang, ang_sup);

  if (last_t >= 0 && t > last_t) {
    int_l6_sq += 0.5 * (t - last_t) * (l6sq + last_l6_sq);
    int_l6_ang_sq += 0.5 * (t - last_t) * (ang_l6sq + last_l6_ang_sq);
  }
  last_t = t;
  last_l6_sq = l6sq;
  last_l6_ang_sq = ang_l6sq;
}

double StrichartzAccumulator::value() const {
  return sup_sobolev + std::sqrt(int_l6_sq) + sup_sobolev_ang + std::sqrt(int_l6_ang_sq);
}

SlopeFit fit_log_slope(const std::vector<double>& t, const std::vector<double>& value,
                       double t_lo, double t_hi) {
  SlopeFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(value[i] > 0)) continue;
    double x = std::log(t[i]), y = std::log(value[i]);
    pts.emplace_back(x, y);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.n = static_cast<int>(pts.size());
  if (fit.n < 2) return fit;
  double den = fit.n * sxx - sx * sx;
  fit.slope = (fit.n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / fit.n;
  for (auto [x, y] : pts)
    fit.max_residual = std::max(fit.max_residual, std::abs(y - fit.slope * x - fit.intercept));
  return fit;
}

ScatteringReport scattering_monitor(const std::vector<Snapshot>& snaps) {
  ScatteringReport rep;
  if (snaps.empty()) return rep;
  // free waves f(t) = e^{itH} v(t); matching pairs (s, 2s)
  std::vector<CoeffField> f;
  f.reserve(snaps.size());
  for (const auto& s : snaps) f.push_back(op_propagator(to_coeff(s.v), -s.t));
  for (std::size_t i = 0; i < snaps.size(); ++i)
    for (std::size_t j = i + 1; j < snaps.size(); ++j) {
      if (std::abs(snaps[j].t - 2 * snaps[i].t) > 1e-9 * snaps[j].t) continue;
      rep.s.push_back(snaps[i].t);
      rep.defect.push_back(l2_norm(op_bracket(f[j] - f[i])));
    }
  if (rep.s.size() >= 2) {
    SlopeFit fit = fit_log_slope(rep.s, rep.defect, 0, 1e300);
    rep.eps_hat = -fit.slope;
  }

  // reconstructed free wave from the last snapshot: check it solves the
  // linearized equation (i d/dt + Lap) u - 2 Re u = 0
  const auto& last = snaps.back();
  CoeffField vplus = f.back();
  double t = last.t;
  CoeffField w = op_propagator(vplus, t);  // v^{lin}(t)
  Field v = to_field(w);
  Field u = u_from_v(v, 0.0);
  CoeffField dw(w.grid);
  for (std::size_t i = 0; i < w.size(); ++i) dw.c[i] = cplx(0, -sym_h(w.grid.xi_norm(i))) * w.c[i];
  Field vdot = to_field(dw);
  CoeffField im_dot = to_coeff(imag_part(vdot));
  im_dot.c[0] = cplx(0, 0);
  Field u2dot = to_field(apply_radial_multiplier(im_dot, sym_Uinv, 0));
  // zero mode rides the companion ODE: d/dt mean(u2) = -2 mean(u1)
  double m1 = mean_value(u).real();
  Field udot(v.grid);
  for (std::size_t i = 0; i < udot.size(); ++i)
    udot.v[i] = cplx(vdot.v[i].real(), u2dot.v[i].real() - 2.0 * m1);
  Field lap_u = to_field(apply_radial_multiplier(to_coeff(u),
                                                 [](double r) { return -r * r; }, 0));
  Field res(v.grid);
  for (std::size_t i = 0; i < res.size(); ++i)
    res.v[i] = cplx(0, 1) * udot.v[i] + lap_u.v[i] - 2.0 * cplx(u.v[i].real(), 0);
  double ref = l2_norm(u);
  rep.lin_residual = ref > 0 ? l2_norm(res) / ref : 0.0;
  return rep;
}

}  // namespace cqnls
