#include "cqnls/dispersive.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "cqnls/errors.hpp"
#include "cqnls/multipliers.hpp"
#include "cqnls/observables.hpp"
#include "cqnls/quadrature.hpp"

namespace cqnls {

RadialProfile lp_bump_profile(double N) {
  RadialProfile p;
  p.fhat = [N](double rho) { return lp_psi(rho / N); };
  p.rho_lo = N / 2;
  p.rho_hi = 1.1 * N;
  return p;
}

std::vector<cplx> radial_propagate(const RadialProfile& p, double t,
                                   const std::vector<double>& r, double tol) {
  if (!(p.rho_hi > p.rho_lo) || p.rho_lo < 0)
    throw Error("radial_propagate: bad profile support");
  const double range = p.rho_hi - p.rho_lo;

  double hp_max = 0;
  for (int i = 0; i <= 64; ++i)
    hp_max = std::max(hp_max, sym_hp(p.rho_lo + range * i / 64.0));
  double r_max = 0;
  for (double rr : r) r_max = std::max(r_max, rr);

  // a full 2pi of phase is covered by >= 8 panels (4-point Gauss each)
  double w = 2 * M_PI / (8 * (std::abs(t) * hp_max + r_max) + 1e-12);
  std::size_t n0 = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(range / w)));

  std::vector<cplx> prev, cur(r.size());
  for (int pass = 0; pass < 13; ++pass) {
    std::size_t n = n0 << pass;
    if (n > (std::size_t)4e6)
      throw UnresolvedOscillationError(
          "radial_propagate: oscillation not resolvable within the panel budget");
    // nodes and the r-independent part of the integrand
    std::vector<double> nodes;
    std::vector<cplx> coef;
    nodes.reserve(4 * n);
    coef.reserve(4 * n);
    double dw = range / n;
    for (std::size_t k = 0; k < n; ++k) {
      Quad1D q = gauss_legendre(4, p.rho_lo + k * dw, p.rho_lo + (k + 1) * dw);
      for (std::size_t j = 0; j < q.x.size(); ++j) {
        double rho = q.x[j];
        double f = p.fhat(rho);
        if (f == 0) continue;
        cplx osc = std::polar(1.0, -t * sym_h(rho));
        nodes.push_back(rho);
        coef.push_back(std::sqrt(2 / M_PI) * q.w[j] * f * rho * osc);
      }
    }
    for (std::size_t i = 0; i < r.size(); ++i) {
      cplx acc = 0;
      double rr = r[i];
      if (rr < 1e-12) {
        for (std::size_t k = 0; k < nodes.size(); ++k) acc += coef[k] * nodes[k];
      } else {
        for (std::size_t k = 0; k < nodes.size(); ++k)
          acc += coef[k] * (std::sin(nodes[k] * rr) / rr);
      }
      cur[i] = acc;
    }
    if (pass > 0) {
      double diff = 0;
      for (std::size_t i = 0; i < r.size(); ++i)
        diff = std::max(diff, std::abs(cur[i] - prev[i]));
      if (diff < tol) return cur;
    }
    prev = cur;
  }
  throw UnresolvedOscillationError("radial_propagate: refinement did not converge");
}

double profile_l1(const RadialProfile& p) {
  const double block = 100 / p.rho_hi;  // ~100 wavelengths of the top frequency
  const int pts = 2000;
  double total = 0;
  for (int b = 0; b < 10; ++b) {
    std::vector<double> rs(pts);
    double a0 = b * block, dx = block / pts;
    for (int i = 0; i < pts; ++i) rs[i] = a0 + (i + 0.5) * dx;
    auto u = radial_propagate(p, 0, rs, 1e-12);
    double part = 0;
    for (int i = 0; i < pts; ++i) part += 4 * M_PI * rs[i] * rs[i] * std::abs(u[i]) * dx;
    total += part;
    if (b > 0 && part < 1e-10 * total) break;
  }
  return total;
}

namespace {

DecayPoint sup_over_r(const RadialProfile& p, double N, double t) {
  double speed = sym_hp(p.rho_hi);
  double r_hi = 1.3 * std::abs(t) * speed + 20 / N;
  const int nc = 257;
  std::vector<double> rs(nc);
  for (int i = 0; i < nc; ++i) rs[i] = r_hi * i / (nc - 1);
  auto u = radial_propagate(p, t, rs, 1e-10);
  int best = 0;
  for (int i = 1; i < nc; ++i)
    if (std::abs(u[i]) > std::abs(u[best])) best = i;

  double lo = rs[std::max(0, best - 2)], hi = rs[std::min(nc - 1, best + 2)];
  const int nf = 129;
  std::vector<double> rf(nf);
  for (int i = 0; i < nf; ++i) rf[i] = lo + (hi - lo) * i / (nf - 1);
  auto uf = radial_propagate(p, t, rf, 1e-10);
  DecayPoint d;
  d.t = t;
  d.sup = std::abs(u[best]);
  d.r_at = rs[best];
  for (int i = 0; i < nf; ++i)
    if (std::abs(uf[i]) > d.sup) {
      d.sup = std::abs(uf[i]);
      d.r_at = rf[i];
    }
  return d;
}

}  // namespace

DispersiveAudit dispersive_audit(double N, const std::vector<double>& ts) {
  RadialProfile p = lp_bump_profile(N);
  DispersiveAudit a;
  a.N = N;
  a.l1 = profile_l1(p);
  std::vector<double> tv, sv;
  for (double t : ts) {
    DecayPoint d = sup_over_r(p, N, t);
    double env = std::min({N * N * N, N * N / t, std::sqrt(N) * std::pow(t, -1.5)});
    d.claimed = env * a.l1;
    a.points.push_back(d);
    tv.push_back(t);
    sv.push_back(d.sup);
  }
  if (tv.size() >= 2) {
    SlopeFit f = fit_log_slope(tv, sv, tv.front(), tv.back());
    a.slope = f.slope;
  }
  a.env_ratio_min = std::numeric_limits<double>::infinity();
  a.env_ratio_max = 0;
  for (const auto& d : a.points) {
    double q = d.sup / d.claimed;
    a.env_ratio_min = std::min(a.env_ratio_min, q);
    a.env_ratio_max = std::max(a.env_ratio_max, q);
  }
  return a;
}

HessianEigs hessian_eigs(double r) {
  if (!(r > 0)) throw SymbolSingularityError("hessian_eigs: requires |xi| > 0");
  return {sym_hpp(r), sym_hp(r) / r};
}

HessianEigs hessian_eigs_fd(double r, double step) {
  if (!(r > 0)) throw SymbolSingularityError("hessian_eigs_fd: requires |xi| > 0");
  if (!(step > 0)) step = 1e-2 * r;  // balances roundoff in the second differences
                                     // against truncation (both well below 1e-9)
  auto H = [](double x, double y, double z) { return sym_h(std::sqrt(x * x + y * y + z * z)); };
  double x0[3] = {r, 0, 0};
  auto entry = [&](int i, int j, double s) {
    double e[3] = {0, 0, 0}, f[3] = {0, 0, 0};
    e[i] = s;
    f[j] = s;
    double pp = H(x0[0] + e[0] + f[0], x0[1] + e[1] + f[1], x0[2] + e[2] + f[2]);
    double pm = H(x0[0] + e[0] - f[0], x0[1] + e[1] - f[1], x0[2] + e[2] - f[2]);
    double mp = H(x0[0] - e[0] + f[0], x0[1] - e[1] + f[1], x0[2] - e[2] + f[2]);
    double mm = H(x0[0] - e[0] - f[0], x0[1] - e[1] - f[1], x0[2] - e[2] - f[2]);
    return (pp - pm - mp + mm) / (4 * s * s);
  };
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      // the base stencils are second order; two Richardson levels in s^2
      double a1 = (4 * entry(i, j, step / 2) - entry(i, j, step)) / 3;
      double a2 = (4 * entry(i, j, step / 4) - entry(i, j, step / 2)) / 3;
      M(i, j) = (16 * a2 - a1) / 15;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M);
  double v0 = es.eigenvalues()(0), v1 = es.eigenvalues()(1), v2 = es.eigenvalues()(2);
  HessianEigs h;
  if (std::abs(v1 - v0) <= std::abs(v2 - v1)) {
    h.tangential = 0.5 * (v0 + v1);
    h.radial = v2;
  } else {
    h.tangential = 0.5 * (v1 + v2);
    h.radial = v0;
  }
  return h;
}

}  // namespace cqnls
