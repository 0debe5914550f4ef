#include <doctest.h>

#include <cmath>
#include <random>

#include "cqnls/observables.hpp"

using namespace cqnls;

namespace {

Field gaussian_bump(const Grid& g, double width) {
  Field f(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto x = g.x(i);
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    f.v[i] = cplx(std::exp(-r2 / (width * width)), 0.3 * std::exp(-r2 / (width * width)));
  }
  return f;
}

}  // namespace

TEST_CASE("j_apply reduces to coordinate multiplication at t = 0") {
  Grid g(3, 16, 16.0);
  Field f = gaussian_bump(g, 2.0);
  for (int axis = 0; axis < 3; ++axis) {
    Field a = j_apply(f, 0.0, axis, JForm::conjugation);
    Field b = j_apply(f, 0.0, axis, JForm::expanded);
    Field x = multiply_by_x(f, axis);
    CHECK(l2_norm(a - x) < 1e-10 * l2_norm(x));
    CHECK(l2_norm(b - x) < 1e-10 * l2_norm(x));
  }
}

TEST_CASE("the two J forms converge to each other as the box grows") {
  // the conjugation form solves the periodic problem exactly; the expanded
  // multiplier is the whole-space identity, so on a box of side L the two
  // differ by O(1/L) for t > 0.  Check the level and the decay rate.
  auto rel_gap = [](int m, double L, double t) {
    Grid g(3, m, L);
    Field f = gaussian_bump(g, 2.5);
    Field a = j_apply(f, t, 0, JForm::conjugation);
    Field b = j_apply(f, t, 0, JForm::expanded);
    return l2_norm(a - b) / l2_norm(a);
  };
  double e32 = rel_gap(32, 32.0, 0.5);
  double e64 = rel_gap(64, 64.0, 0.5);
  CHECK(e32 < 5e-2);
  CHECK(e64 < 0.6 * e32);
  // at t = 0 they are identical up to roundoff, so the gap must vanish with t
  CHECK(rel_gap(32, 32.0, 0.01) < 5e-3);
}

TEST_CASE("x_norm components are individually correct") {
  Grid g(3, 16, 16.0);
  Field f = gaussian_bump(g, 2.0);
  XNormBreakdown nb = x_norm(f, 0.3);
  CHECK(nb.sobolev == doctest::Approx(l2_norm(op_bracket(to_coeff(f)))).epsilon(1e-12));
  double w2 = 0;
  for (int a = 0; a < 3; ++a) {
    double n = l2_norm(j_apply(f, 0.3, a, JForm::conjugation));
    w2 += n * n;
  }
  CHECK(nb.weighted == doctest::Approx(std::sqrt(w2)).epsilon(1e-12));
  CHECK(nb.total() == doctest::Approx(nb.sobolev + nb.weighted + nb.angular).epsilon(1e-14));
  CHECK(nb.angular > 0);
}

TEST_CASE("strichartz accumulator integrates a constant series exactly") {
  Grid g(3, 16, 16.0);
  Field f = gaussian_bump(g, 2.0);
  StrichartzAccumulator acc;
  acc.add(0.0, f);
  acc.add(0.5, f);
  acc.add(1.0, f);
  double l6 = lp_norm(to_field(op_bracket(to_coeff(f))), 6);
  CHECK(acc.int_l6_sq == doctest::Approx(l6 * l6).epsilon(1e-12));
  CHECK(acc.sup_sobolev == doctest::Approx(l2_norm(op_bracket(to_coeff(f)))).epsilon(1e-12));
  CHECK(acc.value() > 0);
}

TEST_CASE("fit_log_slope recovers exact power laws") {
  std::vector<double> t, val;
  for (double tt = 1.0; tt <= 100.0; tt *= 1.3) {
    t.push_back(tt);
    val.push_back(3.7 * std::pow(tt, -1.5));
  }
  SlopeFit fit = fit_log_slope(t, val, 0.5, 200.0);
  CHECK(fit.slope == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-10));
  CHECK(fit.max_residual < 1e-12);
  CHECK(fit.n == static_cast<int>(t.size()));
  // window restriction drops points
  SlopeFit fit2 = fit_log_slope(t, val, 2.0, 50.0);
  CHECK(fit2.n < fit.n);
  CHECK(fit2.slope == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("scattering monitor reports zero defect on exact free waves") {
  Grid g(3, 16, 16.0);
  Field f0 = gaussian_bump(g, 2.0);
  CoeffField c0 = to_coeff(f0);
  std::vector<Snapshot> snaps;
  for (double s : {1.0, 2.0, 4.0})
    snaps.push_back({s, to_field(op_propagator(c0, s)), 0.0});
  ScatteringReport rep = scattering_monitor(snaps);
  REQUIRE(rep.s.size() == 2);  // pairs (1,2) and (2,4)
  double n0 = l2_norm(op_bracket(c0));
  for (double d : rep.defect) CHECK(d < 1e-11 * n0);
  CHECK(rep.lin_residual < 1e-8);
}
