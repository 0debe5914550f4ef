#include <doctest.h>

#include <cmath>

#include "cqnls/dispersive.hpp"
#include "cqnls/multipliers.hpp"
#include "cqnls/quadrature.hpp"

using namespace cqnls;

namespace {

// direct slow quadrature of the radial transform at t (oracle for small t)
cplx slow_eval(const RadialProfile& p, double t, double r) {
  Quad1D q = gauss_legendre(400, p.rho_lo, p.rho_hi);
  cplx s(0, 0);
  for (std::size_t i = 0; i < q.x.size(); ++i) {
    double rho = q.x[i];
    double kern = r == 0 ? rho : std::sin(rho * r) / r;
    s += q.w[i] * std::exp(cplx(0, -t * sym_h(rho))) * kern * p.fhat(rho) * rho;
  }
  return std::sqrt(2.0 / M_PI) * s;
}

}  // namespace

TEST_CASE("bump profile has the right support") {
  RadialProfile p = lp_bump_profile(2.0);
  CHECK(p.rho_lo == doctest::Approx(1.0));
  CHECK(p.rho_hi == doctest::Approx(2.2));
  CHECK(p.fhat(0.99) == 0.0);
  CHECK(p.fhat(2.21) == 0.0);
  CHECK(p.fhat(1.6) > 0.0);
}

TEST_CASE("propagated profile matches direct quadrature at small times") {
  RadialProfile p = lp_bump_profile(1.0);
  std::vector<double> rs{0.0, 0.5, 1.7, 4.0, 9.3};
  for (double t : {0.0, 0.3, 2.0}) {
    auto got = radial_propagate(p, t, rs, 1e-10);
    for (std::size_t i = 0; i < rs.size(); ++i) {
      cplx ex = slow_eval(p, t, rs[i]);
      CHECK(std::abs(got[i] - ex) < 1e-8 * (1 + std::abs(ex)));
    }
  }
}

TEST_CASE("propagation is linear in the profile") {
  RadialProfile p = lp_bump_profile(1.0);
  RadialProfile p2{[&](double rho) { return 3.0 * p.fhat(rho); }, p.rho_lo, p.rho_hi};
  std::vector<double> rs{0.3, 1.1, 5.0};
  auto a = radial_propagate(p, 1.5, rs, 1e-10);
  auto b = radial_propagate(p2, 1.5, rs, 1e-10);
  for (std::size_t i = 0; i < rs.size(); ++i)
    CHECK(std::abs(b[i] - 3.0 * a[i]) < 1e-9 * std::abs(b[i]));
}

TEST_CASE("the flow is unitary in L^2(r^2 dr)") {
  RadialProfile p = lp_bump_profile(1.0);
  // || u(t) ||^2_{L^2(r^2 dr)} = || fhat ||^2_{L^2(rho^2 drho)} for all t
  Quad1D q = gauss_legendre(200, p.rho_lo, p.rho_hi);
  double ref = 0;
  for (std::size_t i = 0; i < q.x.size(); ++i)
    ref += q.w[i] * q.x[i] * q.x[i] * p.fhat(q.x[i]) * p.fhat(q.x[i]);
  for (double t : {0.0, 5.0}) {
    // trapezoid over a generous radial window; the far tail still carries
    // a little mass, so the check is at 1e-3 rather than machine level
    double R = 150.0 + 3.0 * t;
    int n = 8000;
    std::vector<double> rs(n);
    for (int i = 0; i < n; ++i) rs[i] = (i + 0.5) * R / n;
    auto u = radial_propagate(p, t, rs, 1e-9);
    double mass = 0;
    for (int i = 0; i < n; ++i) mass += (R / n) * rs[i] * rs[i] * std::norm(u[i]);
    CHECK(mass == doctest::Approx(ref).epsilon(1e-3));
  }
}

TEST_CASE("decay audit: slope and envelope on a late-time window") {
  // the t^{-3/2} rate only sets in after the stationary point leaves the
  // origin-dominated regime (t of order 100 for N = 1)
  DispersiveAudit a = dispersive_audit(1.0, {120.0, 210.0, 360.0, 620.0, 1000.0});
  CHECK(a.l1 > 0);
  CHECK(a.points.size() == 5);
  CHECK(a.slope > -1.7);
  CHECK(a.slope < -1.3);
  for (const auto& pt : a.points) {
    CHECK(pt.sup > 0);
    CHECK(pt.claimed > 0);
  }
  CHECK(a.env_ratio_max / a.env_ratio_min < 50.0);
}

TEST_CASE("hessian eigenvalues: closed form vs finite differences") {
  for (double r : {0.01, 0.1, 1.0, 3.7, 40.0}) {
    HessianEigs ex = hessian_eigs(r);
    HessianEigs fd = hessian_eigs_fd(r);
    CHECK(std::abs(fd.radial / ex.radial - 1.0) < 1e-6);
    CHECK(std::abs(fd.tangential / ex.tangential - 1.0) < 1e-6);
  }
  // spot values at r = 1: h''(1) = 2*4/3^{3/2} = 8/3^{3/2}, h'(1)/1 = 4/sqrt(3)
  HessianEigs e1 = hessian_eigs(1.0);
  CHECK(e1.radial == doctest::Approx(8.0 / std::pow(3.0, 1.5)).epsilon(1e-13));
  CHECK(e1.tangential == doctest::Approx(4.0 / std::sqrt(3.0)).epsilon(1e-13));
}
