#include <doctest.h>

#include <cmath>
#include <random>

#include "cqnls/resonance.hpp"

using namespace cqnls;

namespace {

V3 rand_v3(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> U(-1, 1);
  std::uniform_real_distribution<double> R(std::log(lo), std::log(hi));
  V3 d{U(rng), U(rng), U(rng)};
  double n = norm3(d);
  if (n == 0) return {lo, 0, 0};
  return scale3(std::exp(R(rng)) / n, d);
}

}  // namespace

TEST_CASE("phase values match their definitions") {
  V3 x1{0.4, -1.2, 0.7}, x2{2.0, 0.3, -0.5};
  V3 x = add3(x1, x2);
  auto H = [](const V3& y) {
    double r = norm3(y);
    return r * std::sqrt(2 + r * r);
  };
  CHECK(phase(PhaseType::conj2, x1, x2) ==
        doctest::Approx(H(x) + H(x1) + H(x2)).epsilon(1e-14));
  CHECK(phase(PhaseType::plain2, x1, x2) ==
        doctest::Approx(H(x) - H(x1) - H(x2)).epsilon(1e-14));
  CHECK(phase(PhaseType::mixed, x1, x2) ==
        doctest::Approx(H(x) - H(x1) + H(x2)).epsilon(1e-14));
}

TEST_CASE("phase gradients agree with finite differences") {
  std::mt19937_64 rng(11);
  double h = 1e-5;
  for (auto t : {PhaseType::conj2, PhaseType::plain2, PhaseType::mixed}) {
    for (int it = 0; it < 40; ++it) {
      V3 x1 = rand_v3(rng, 0.3, 5.0), x2 = rand_v3(rng, 0.3, 5.0);
      V3 gx = grad_xi_phase(t, x1, x2);   // d/dxi at fixed xi2
      V3 g2 = grad_xi2_phase(t, x1, x2);  // d/dxi2 at fixed xi
      for (int a = 0; a < 3; ++a) {
        // moving xi at fixed xi2 means perturbing xi1
        V3 p = x1, m = x1;
        p[a] += h;
        m[a] -= h;
        double fd = (phase(t, p, x2) - phase(t, m, x2)) / (2 * h);
        CHECK(gx[a] == doctest::Approx(fd).epsilon(1e-6));
        // moving xi2 at fixed xi means xi1 -> xi1 - dxi2
        V3 p1 = x1, p2 = x2, m1 = x1, m2 = x2;
        p1[a] -= h;
        p2[a] += h;
        m1[a] += h;
        m2[a] -= h;
        double fd2 = (phase(t, p1, p2) - phase(t, m1, m2)) / (2 * h);
        CHECK(g2[a] == doctest::Approx(fd2).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("angle and perpendicular component helpers") {
  V3 ex{1, 0, 0}, ey{0, 1, 0};
  CHECK(angle3(ex, ey) == doctest::Approx(M_PI / 2).epsilon(1e-14));
  CHECK(angle3(ex, ex) == doctest::Approx(0.0));
  CHECK(angle3(ex, scale3(-1, ex)) == doctest::Approx(M_PI));
  // tiny angles stay accurate
  V3 near{1.0, 1e-9, 0};
  CHECK(angle3(ex, near) == doctest::Approx(1e-9).epsilon(1e-6));
  V3 p = perp_component({1, 1, 0}, {1, 0, 0});
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(dot3(perp_component({0.3, -0.7, 1.1}, {2, 1, -1}), {2, 1, -1}) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("closed-form dispersion derivatives: FD cross-check and comparator bands") {
  HDerivAudit a = h_derivative_audit(400, 1e-3, 1e3);
  CHECK(a.max_rel_err < 1e-6);
  // |h'| / <r> in [1,2], |h''| / (r/<r>) in [2,3],
  // |h'''| <r>^5 = 12, |h''''| <r>^7 / r = 60
  CHECK(a.ratio_lo[0] >= 1.0 - 1e-9);
  CHECK(a.ratio_hi[0] <= 2.0 + 1e-9);
  CHECK(a.ratio_lo[1] >= 2.0 - 1e-9);
  CHECK(a.ratio_hi[1] <= 3.0 + 1e-9);
  CHECK(a.ratio_lo[2] == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(a.ratio_hi[2] == doctest::Approx(12.0).epsilon(1e-9));
  CHECK(a.ratio_lo[3] == doctest::Approx(60.0).epsilon(1e-9));
  CHECK(a.ratio_hi[3] == doctest::Approx(60.0).epsilon(1e-9));
}

TEST_CASE("gradient difference comparator stays bounded") {
  GradDiffAudit a = grad_h_difference_audit(20000, 2024);
  CHECK(a.max_ratio > 0.5);  // the bound is attained up to a modest constant
  CHECK(a.max_ratio < 8.0);
}

TEST_CASE("partition of unity on every family and a dyad sample") {
  AtlasConfig cfg;
  for (auto t : {PhaseType::conj2, PhaseType::plain2, PhaseType::mixed}) {
    for (auto [N1, N2] : std::vector<std::pair<double, double>>{
             {0.125, 0.125}, {1, 1}, {8, 0.25}, {0.25, 8}, {8, 8}}) {
      RegionFamily fam = build_region_family(t, N1, N2, cfg);
      double res = partition_residual(fam, 4000, 99);
      CHECK(res <= 1e-10);
    }
  }
}

TEST_CASE("denominators are positive on sampled region supports") {
  AtlasConfig cfg;
  for (auto t : {PhaseType::conj2, PhaseType::plain2, PhaseType::mixed}) {
    for (auto [N1, N2] : std::vector<std::pair<double, double>>{{1, 1}, {8, 0.5}, {0.5, 8}}) {
      RegionFamily fam = build_region_family(t, N1, N2, cfg);
      for (const auto& d : audit_denominators(fam)) {
        CHECK(d.positive);
        if (d.n_support > 0) CHECK(d.min_denom > 0);
      }
    }
  }
}

TEST_CASE("exactly one mixed band is active per dyad pair") {
  AtlasConfig cfg;
  for (double N1 = 0.125; N1 <= 64.01; N1 *= 2)
    for (double N2 = 0.125; N2 <= 8.01; N2 *= 2) {
      RegionFamily fam = build_region_family(PhaseType::mixed, N1, N2, cfg);
      // regions 2 (wide angle) and the band-specific ones partition; the
      // band structure requires at least one active region
      int active = 0;
      for (const auto& r : fam.regions) active += r.active ? 1 : 0;
      CHECK(active >= 1);
      double res = partition_residual(fam, 2000, 7);
      CHECK(res <= 1e-10);
    }
}

TEST_CASE("mid-band frequency split calibrates to 16") {
  AtlasConfig cfg;
  CHECK(calibrate_mixed_C(cfg, 0.125, 64.0, 4000) == 16.0);
}

TEST_CASE("conj2 time multiplier obeys its claimed size at one dyad") {
  AtlasConfig cfg;
  RegionFamily fam = build_region_family(PhaseType::conj2, 1.0, 1.0, cfg);
  REQUIRE(fam.regions.size() == 1);
  REQUIRE(fam.regions[0].multipliers.size() == 1);
  OpNormConfig on;
  on.n_xi = 5;
  on.n_base_r = 32;
  on.n_base_theta = 48;
  auto audits = audit_multiplier_bounds(fam, on);
  REQUIRE(audits.size() == 1);
  CHECK(!audits[0].empty);
  CHECK(audits[0].measured > 0);
  CHECK(audits[0].claimed > 0);
}
