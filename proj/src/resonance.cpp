#include "cqnls/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "cqnls/errors.hpp"
#include "cqnls/multipliers.hpp"

namespace cqnls {

// ---- phases -------------------------------------------------------------------

double phase(PhaseType t, const V3& xi1, const V3& xi2) {
  double H = sym_h(norm3(add3(xi1, xi2)));
  double H1 = sym_h(norm3(xi1));
  double H2 = sym_h(norm3(xi2));
  switch (t) {
    case PhaseType::conj2: return H + H1 + H2;
    case PhaseType::plain2: return H - H1 - H2;
    case PhaseType::mixed: return H - H1 + H2;
  }
  return 0;
}

V3 grad_H(const V3& xi) {
  double r = norm3(xi);
  if (r == 0) return {0, 0, 0};
  return scale3(sym_hp(r) / r, xi);
}

// derivative in the output frequency at fixed xi2
V3 grad_xi_phase(PhaseType t, const V3& xi1, const V3& xi2) {
  V3 g = grad_H(add3(xi1, xi2));
  V3 g1 = grad_H(xi1);
  return t == PhaseType::conj2 ? add3(g, g1) : sub3(g, g1);
}

// derivative in xi2 at fixed output frequency xi
V3 grad_xi2_phase(PhaseType t, const V3& xi1, const V3& xi2) {
  V3 g1 = grad_H(xi1);
  V3 g2 = grad_H(xi2);
  switch (t) {
    case PhaseType::conj2: return sub3(g2, g1);
    case PhaseType::plain2: return sub3(g1, g2);
    case PhaseType::mixed: return add3(g1, g2);
  }
  return {0, 0, 0};
}

double angle3(const V3& a, const V3& b) {
  V3 c{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
  return std::atan2(norm3(c), dot3(a, b));
}

V3 perp_component(const V3& xi, const V3& xi2) {
  double r2 = dot3(xi2, xi2);
  if (r2 == 0) return xi;
  return sub3(xi, scale3(dot3(xi, xi2) / r2, xi2));
}

// ---- cutoffs and symbol assembly ------------------------------------------------

namespace {

using F2 = std::function<double(const V3&, const V3&)>;

double br(double r) { return std::sqrt(2 + r * r); }  // <r>

// smooth steps with one-sided support: step_up vanishes for x <= thr and is 1
// for x >= thr + w; step_dn vanishes for x >= thr and is 1 for x <= thr - w
double step_up(double x, double thr, double w) { return lp_smooth_step((x - thr) / w); }
double step_dn(double x, double thr, double w) { return lp_smooth_step((thr - x) / w); }

double coeff_A(const V3& x1, const V3& x2, const AtlasConfig& cfg) {
  return cfg.a_variant == 2 ? nf_A2(x1, x2) : nf_A1(x1, x2, cfg.beta);
}

// rho * psi_fat(xi1/N1) psi_fat(xi2/N2) * A * U(|xi|)
F2 make_env(F2 rho, double N1, double N2, AtlasConfig cfg) {
  return [rho = std::move(rho), N1, N2, cfg](const V3& x1, const V3& x2) {
    double e = lp_psi_fat(norm3(x1) / N1) * lp_psi_fat(norm3(x2) / N2);
    if (e == 0) return 0.0;
    double rr = rho(x1, x2);
    if (rr == 0) return 0.0;
    return e * rr * coeff_A(x1, x2, cfg) * sym_U(norm3(add3(x1, x2)));
  };
}

Symbol2 time_symbol(PhaseType t, F2 env) {
  Symbol2 s;
  s.ncomp = 3;
  s.eval = [t, env = std::move(env)](const V3& x1, const V3& x2, double* out) {
    double e = env(x1, x2);
    if (e == 0) {
      out[0] = out[1] = out[2] = 0;
      return;
    }
    double ph = phase(t, x1, x2);
    V3 g = grad_xi_phase(t, x1, x2);
    for (int i = 0; i < 3; ++i) out[i] = e * g[i] / ph;
  };
  return s;
}

Symbol2 space_symbol(PhaseType t, F2 env) {
  Symbol2 s;
  s.ncomp = 9;
  s.eval = [t, env = std::move(env)](const V3& x1, const V3& x2, double* out) {
    double e = env(x1, x2);
    if (e == 0) {
      std::fill(out, out + 9, 0.0);
      return;
    }
    V3 g = grad_xi_phase(t, x1, x2);
    V3 g2 = grad_xi2_phase(t, x1, x2);
    double den = dot3(g2, g2);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = e * g[i] * g2[j] / den;
  };
  return s;
}

// divergence in xi2 (at fixed output frequency) of a 9-component symbol,
// contracted over the second index; computed by central differences with a
// step well below every registered transition scale
Symbol2 div2_symbol(const Symbol2& b9, double h_in) {
  Symbol2 s;
  s.ncomp = 3;
  s.eval = [b9, h_in](const V3& x1, const V3& x2, double* out) {
    double bp[9], bm[9];
    out[0] = out[1] = out[2] = 0;
    for (int j = 0; j < 3; ++j) {
      V3 x1p = x1, x2p = x2, x1m = x1, x2m = x2;
      x2p[j] += h_in;
      x1p[j] -= h_in;  // xi = xi1 + xi2 held fixed
      x2m[j] -= h_in;
      x1m[j] += h_in;
      b9.eval(x1p, x2p, bp);
      b9.eval(x1m, x2m, bm);
      for (int i = 0; i < 3; ++i) out[i] += (bp[3 * i + j] - bm[3 * i + j]) / (2 * h_in);
    }
  };
  return s;
}

// angular family: m = env * grad_xi Phi / (xi_perp2 . grad H(xi1))
Symbol2 angular_m_symbol(PhaseType t, F2 env) {
  Symbol2 s;
  s.ncomp = 3;
  s.eval = [t, env = std::move(env)](const V3& x1, const V3& x2, double* out) {
    double e = env(x1, x2);
    if (e == 0) {
      out[0] = out[1] = out[2] = 0;
      return;
    }
    V3 xi = add3(x1, x2);
    double den = dot3(perp_component(xi, x2), grad_H(x1));
    V3 g = grad_xi_phase(t, x1, x2);
    for (int i = 0; i < 3; ++i) out[i] = e * g[i] / den;
  };
  return s;
}

// b_angle = div_xi2 [ m xi_perp2 ], a 3-vector (divergence over the perp slot)
Symbol2 angular_div_symbol(const Symbol2& m3, double h_in) {
  Symbol2 s;
  s.ncomp = 3;
  s.eval = [m3, h_in](const V3& x1, const V3& x2, double* out) {
    double mp[3], mm[3];
    out[0] = out[1] = out[2] = 0;
    for (int j = 0; j < 3; ++j) {
      V3 x1p = x1, x2p = x2, x1m = x1, x2m = x2;
      x2p[j] += h_in;
      x1p[j] -= h_in;
      x2m[j] -= h_in;
      x1m[j] += h_in;
      m3.eval(x1p, x2p, mp);
      m3.eval(x1m, x2m, mm);
      V3 pp = perp_component(add3(x1p, x2p), x2p);
      V3 pm = perp_component(add3(x1m, x2m), x2m);
      for (int i = 0; i < 3; ++i) out[i] += (mp[i] * pp[j] - mm[i] * pm[j]) / (2 * h_in);
    }
  };
  return s;
}

// b_angle_k = m (x) (xi_k cross xi) / |xi_k|^2
Symbol2 angular_cross_symbol(const Symbol2& m3, int which) {
  Symbol2 s;
  s.ncomp = 9;
  s.eval = [m3, which](const V3& x1, const V3& x2, double* out) {
    double m[3];
    m3.eval(x1, x2, m);
    const V3& xk = which == 1 ? x1 : x2;
    V3 xi = add3(x1, x2);
    V3 c{xk[1] * xi[2] - xk[2] * xi[1], xk[2] * xi[0] - xk[0] * xi[2],
         xk[0] * xi[1] - xk[1] * xi[0]};
    double rk2 = dot3(xk, xk);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = m[i] * c[j] / rk2;
  };
  return s;
}

// tilde b_angle = m (x) [ (xi.xi1hat) xi1hat - (xi.xi2hat) xi2hat ]
Symbol2 angular_tilde_symbol(const Symbol2& m3) {
  Symbol2 s;
  s.ncomp = 9;
  s.eval = [m3](const V3& x1, const V3& x2, double* out) {
    double m[3];
    m3.eval(x1, x2, m);
    V3 xi = add3(x1, x2);
    double r1 = norm3(x1), r2 = norm3(x2);
    V3 w{0, 0, 0};
    if (r1 > 0) w = add3(w, scale3(dot3(xi, x1) / (r1 * r1), x1));
    if (r2 > 0) w = sub3(w, scale3(dot3(xi, x2) / (r2 * r2), x2));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) out[3 * i + j] = m[i] * w[j];
  };
  return s;
}

// swap the two inputs of a symbol (used for the symmetric-phase family when
// the second input carries the higher frequency)
Symbol2 swap_symbol(const Symbol2& b) {
  Symbol2 s;
  s.ncomp = b.ncomp;
  s.eval = [b](const V3& x1, const V3& x2, double* out) { b.eval(x2, x1, out); };
  return s;
}

F2 swap_f2(F2 f) {
  return [f = std::move(f)](const V3& x1, const V3& x2) { return f(x2, x1); };
}

SupportSpec base_support(double N1, double N2) {
  SupportSpec s;
  s.r1_lo = N1 / 4;
  s.r1_hi = 2.2 * N1;
  s.r2_lo = N2 / 4;
  s.r2_hi = 2.2 * N2;
  s.radial_features = {N1 / 4, N1 / 2, 1.1 * N1, 2.2 * N1,
                       N2 / 4, N2 / 2, 1.1 * N2, 2.2 * N2};
  s.radial_feature_width = std::min(N1, N2) / 25;
  return s;
}

// ---- angle variables ------------------------------------------------------------

double theta01(const V3& x1, const V3& x2) { return angle3(add3(x1, x2), x1); }
double theta02(const V3& x1, const V3& x2) { return angle3(add3(x1, x2), x2); }

// ---- family builders -------------------------------------------------------------

RegionFamily build_conj2(double N1, double N2, const AtlasConfig& cfg) {
  RegionFamily fam;
  fam.type = PhaseType::conj2;
  fam.N1 = N1;
  fam.N2 = N2;
  fam.cfg = cfg;

  RegionSpec r;
  r.index = 1;
  r.name = "conj2_time";
  r.kind = RegionKind::time;
  r.active = true;
  r.rho = [](const V3&, const V3&) { return 1.0; };
  r.denom = [](const V3& a, const V3& b) { return std::abs(phase(PhaseType::conj2, a, b)); };
  r.denom_bound = [N1, N2](const V3&, const V3&) {
    return std::max(N1 * br(N1), N2 * br(N2));
  };
  MultiplierSpec m;
  m.name = "bT";
  m.sym = time_symbol(PhaseType::conj2, make_env(r.rho, N1, N2, cfg));
  m.claimed = 1.0 / std::max(N1, N2);
  m.supp = base_support(N1, N2);
  r.multipliers.push_back(std::move(m));
  fam.regions.push_back(std::move(r));
  return fam;
}

// symmetric phase, built for N2 <= N1; the opposite ordering is obtained by
// swapping the inputs everywhere
RegionFamily build_plain2(double N1, double N2, const AtlasConfig& cfg) {
  const bool swapped = N2 > N1;
  const double Nh = std::max(N1, N2);  // carries the plain-psi cutoff
  const double Nl = std::min(N1, N2);
  const PhaseType T = PhaseType::plain2;

  // cutoffs written for (hi, lo) input order
  auto chi1 = [Nh](const V3& a, const V3& b) {
    return lp_phi(8 * norm3(add3(a, b)) / Nh) * lp_psi_fat(norm3(b) / Nh) *
           lp_psi(norm3(a) / Nh);
  };
  const double sep = cfg.angle_sep;
  auto chi2 = [sep](const V3& a, const V3& b) {
    return step_up(theta01(a, b), 2 * M_PI / 3, sep);
  };
  const double t3 = cfg.theta_small * Nh / br(Nh);
  const double w3 = cfg.cone_frac * t3;
  auto chi3 = [t3, w3](const V3& a, const V3& b) {
    double th = theta02(a, b);
    return step_dn(th, t3, w3) + step_up(th, M_PI - t3, w3);
  };

  auto rho1 = chi1;
  auto rho2 = [chi1, chi2](const V3& a, const V3& b) {
    return (1 - chi1(a, b)) * chi2(a, b);
  };
  auto rho3 = [chi1, chi2, chi3](const V3& a, const V3& b) {
    return (1 - chi1(a, b)) * (1 - chi2(a, b)) * chi3(a, b);
  };
  auto rho4 = [chi1, chi2, chi3](const V3& a, const V3& b) {
    return (1 - chi1(a, b)) * (1 - chi2(a, b)) * (1 - chi3(a, b));
  };

  auto orient = [swapped](F2 f) { return swapped ? swap_f2(std::move(f)) : f; };
  // symbols are assembled in (hi, lo) input order, where the gradient slots of
  // time_symbol/space_symbol point at the low-frequency input, and swapped
  // back into caller order at the end
  auto env_of = [&](const F2& rho_hi_lo) {
    return make_env(rho_hi_lo, Nh, Nl, cfg);
  };
  auto orient_sym = [swapped](Symbol2 s) { return swapped ? swap_symbol(s) : s; };

  auto abs_phase = [T](const V3& a, const V3& b) { return std::abs(phase(T, a, b)); };
  // space-region denominator: gradient in the lower-frequency input
  auto space_denom = orient(
      [T](const V3& a, const V3& b) { return norm3(grad_xi2_phase(T, a, b)); });

  const double time_claim = Nh <= 1 ? std::pow(Nh, -1.5) : 1.0 / Nh;

  RegionFamily fam;
  fam.type = T;
  fam.N1 = N1;
  fam.N2 = N2;
  fam.cfg = cfg;

  auto add_time = [&](int idx, const char* name, F2 rho_hi_lo, double claim,
                      F2 dbound, std::vector<AngularFeature> tf) {
    RegionSpec r;
    r.index = idx;
    r.name = name;
    r.kind = RegionKind::time;
    r.rho = orient(rho_hi_lo);
    r.denom = abs_phase;
    r.denom_bound = std::move(dbound);
    MultiplierSpec m;
    m.name = "bT";
    m.sym = orient_sym(time_symbol(T, env_of(rho_hi_lo)));
    m.claimed = claim;
    m.supp = base_support(N1, N2);
    m.supp.theta_features = std::move(tf);
    m.free_slot = swapped ? 1 : 2;
    r.multipliers.push_back(std::move(m));
    fam.regions.push_back(std::move(r));
  };

  add_time(1, "plain2_r1_time", rho1, time_claim,
           [Nh](const V3&, const V3&) { return Nh * br(Nh); }, {});
  add_time(2, "plain2_r2_time", rho2, time_claim,
           [Nh](const V3&, const V3&) { return Nh * br(Nh); }, {});
  add_time(3, "plain2_r3_time", rho3, time_claim,
           [Nh, Nl](const V3&, const V3&) { return Nh * Nh * Nl / br(Nh); },
           {{0.0, t3}, {M_PI, t3}});

  {
    RegionSpec r;
    r.index = 4;
    r.name = "plain2_r4_space";
    r.kind = RegionKind::space;
    r.rho = orient(rho4);
    r.denom = space_denom;
    r.denom_bound = [Nh, Nl](const V3&, const V3&) { return Nh * br(Nl) / br(Nh); };

    Symbol2 bx_hl = space_symbol(T, env_of(rho4));
    const bool split = Nh >= 1 && Nh >= 64 * Nl;
    MultiplierSpec mx;
    mx.name = "bX";
    mx.sym = orient_sym(bx_hl);
    mx.claimed = split ? Nl / Nh : std::pow(br(Nh) / Nh, cfg.x_exponent) * Nl / br(Nl);
    mx.supp = base_support(N1, N2);
    mx.supp.theta_features = {{0.0, t3}, {M_PI, t3}};
    mx.free_slot = swapped ? 1 : 2;

    double h_in = 1e-5 * Nl * w3;
    Symbol2 btx = div2_symbol(bx_hl, h_in);
    MultiplierSpec mtx;
    mtx.name = "btX";
    mtx.sym = orient_sym(btx);
    mtx.claimed = split ? 1.0 / Nh : std::pow(br(Nh) / Nh, 1.5) / br(Nl);
    mtx.supp = mx.supp;
    mtx.free_slot = mx.free_slot;

    r.multipliers.push_back(std::move(mx));
    r.multipliers.push_back(std::move(mtx));
    fam.regions.push_back(std::move(r));
  }
  return fam;
}

RegionFamily build_mixed(double N1, double N2, const AtlasConfig& cfg) {
  const PhaseType T = PhaseType::mixed;
  const double C = cfg.mixed_C;
  const double sep = cfg.angle_sep;

  const bool band_r1 = N1 <= N2 / 64;
  const bool band_mid = !band_r1 && N1 >= C && N1 <= 64 * N2;
  const bool band_r5 = !band_r1 && N1 >= C && N2 < N1 / 64;
  const bool band_low = !band_r1 && N1 < C;

  auto chi2 = [sep](const V3& a, const V3& b) {
    return step_up(theta01(a, b), 2 * M_PI / 3, sep);
  };
  auto chi3 = [sep](const V3& a, const V3& b) {
    double th = theta02(a, b);
    return step_dn(th, M_PI / 3, sep) + step_up(th, 2 * M_PI / 3, sep);
  };
  const double t6 = std::max(M_PI / 2, M_PI - 2 * cfg.theta_small * N1);
  const double w6 = cfg.cone_frac * std::min(M_PI - t6, sep);
  auto chi6 = [t6, w6](const V3& a, const V3& b) {
    return step_up(theta02(a, b), t6, w6);
  };
  const double t7 = std::min(M_PI / 6, 2 * cfg.theta_small * N1);
  const double w7 = cfg.cone_frac * t7;
  auto chi7 = [t7, w7](const V3& a, const V3& b) {
    return step_dn(theta02(a, b), t7, w7);
  };

  auto abs_phase = [](const V3& a, const V3& b) {
    return std::abs(phase(PhaseType::mixed, a, b));
  };
  auto space_denom = [](const V3& a, const V3& b) {
    return norm3(grad_xi2_phase(PhaseType::mixed, a, b));
  };
  auto ang_denom = [](const V3& a, const V3& b) {
    return std::abs(dot3(perp_component(add3(a, b), b), grad_H(a)));
  };

  RegionFamily fam;
  fam.type = T;
  fam.N1 = N1;
  fam.N2 = N2;
  fam.cfg = cfg;

  auto add_time = [&](int idx, const char* name, bool active, F2 rho, double claim,
                      F2 dbound, std::vector<AngularFeature> tf) {
    RegionSpec r;
    r.index = idx;
    r.name = name;
    r.kind = RegionKind::time;
    r.active = active;
    r.rho = std::move(rho);
    r.denom = abs_phase;
    r.denom_bound = std::move(dbound);
    if (active) {
      MultiplierSpec m;
      m.name = std::string("b") + std::to_string(idx) + "T";
      m.sym = time_symbol(T, make_env(r.rho, N1, N2, cfg));
      m.claimed = claim;
      m.supp = base_support(N1, N2);
      m.supp.theta_features = std::move(tf);
      r.multipliers.push_back(std::move(m));
    }
    fam.regions.push_back(std::move(r));
  };
  auto add_space = [&](int idx, const char* name, bool active, F2 rho, double cx,
                       double ctx, F2 dbound, std::vector<AngularFeature> tf,
                       double h_in) {
    RegionSpec r;
    r.index = idx;
    r.name = name;
    r.kind = RegionKind::space;
    r.active = active;
    r.rho = std::move(rho);
    r.denom = space_denom;
    r.denom_bound = std::move(dbound);
    if (active) {
      Symbol2 bx = space_symbol(T, make_env(r.rho, N1, N2, cfg));
      MultiplierSpec mx;
      mx.name = std::string("b") + std::to_string(idx) + "X";
      mx.sym = bx;
      mx.claimed = cx;
      mx.supp = base_support(N1, N2);
      mx.supp.theta_features = tf;
      MultiplierSpec mtx;
      mtx.name = std::string("bt") + std::to_string(idx) + "X";
      mtx.sym = div2_symbol(bx, h_in);
      mtx.claimed = ctx;
      mtx.supp = mx.supp;
      r.multipliers.push_back(std::move(mx));
      r.multipliers.push_back(std::move(mtx));
    }
    fam.regions.push_back(std::move(r));
  };

  // region 1: whole-dyad time region for strongly output-dominated pairs
  add_time(1, "mixed_r1_time", band_r1, [](const V3&, const V3&) { return 1.0; },
           1.0 / N2, [N2](const V3&, const V3&) { return N2 * br(N2); }, {});

  // region 2: output and xi1 nearly opposed
  add_time(2, "mixed_r2_time", !band_r1, chi2, 1.0,
           [N1](const V3& a, const V3& b) { return br(N1) * norm3(add3(a, b)); }, {});

  // region 3: mid band, xi2 within a wide cone of the output axis
  add_time(3, "mixed_r3_time", band_mid,
           [chi2, chi3](const V3& a, const V3& b) {
             return (1 - chi2(a, b)) * chi3(a, b);
           },
           1.0,
           [](const V3& a, const V3& b) {
             return 0.5 * norm3(add3(a, b)) * norm3(b);
           },
           {});

  // region 4: mid band complement; angular non-resonance
  {
    RegionSpec r;
    r.index = 4;
    r.name = "mixed_r4_angular";
    r.kind = RegionKind::angular;
    r.active = band_mid;
    r.rho = [chi2, chi3](const V3& a, const V3& b) {
      return (1 - chi2(a, b)) * (1 - chi3(a, b));
    };
    r.denom = ang_denom;
    r.denom_bound = [](const V3& a, const V3& b) {
      double rr = norm3(add3(a, b));
      return rr * rr;
    };
    if (band_mid) {
      Symbol2 m3 = angular_m_symbol(T, make_env(r.rho, N1, N2, cfg));
      SupportSpec sp = base_support(N1, N2);
      sp.singular_at_zero1 = true;
      sp.singular_at_zero2 = true;
      double h_in = 1e-5 * std::min(N1, N2) * sep;
      auto push = [&](const char* nm, Symbol2 s) {
        MultiplierSpec m;
        m.name = nm;
        m.sym = std::move(s);
        m.claimed = 1.0;
        m.supp = sp;
        r.multipliers.push_back(std::move(m));
      };
      push("bA", angular_div_symbol(m3, h_in));
      push("bA1", angular_cross_symbol(m3, 1));
      push("bA2", angular_cross_symbol(m3, 2));
      push("tbA", angular_tilde_symbol(m3));
    }
    fam.regions.push_back(std::move(r));
  }

  // region 5: high band with a much smaller second input; space non-resonance
  add_space(5, "mixed_r5_space", band_r5,
            [chi2](const V3& a, const V3& b) { return 1 - chi2(a, b); }, N2 / N1,
            1.0 / N1, [N1](const V3&, const V3&) { return N1; }, {},
            1e-5 * std::min(N1, N2));

  // region 6: low band, xi2 nearly opposite the output axis
  add_time(6, "mixed_r6_time", band_low,
           [chi2, chi6](const V3& a, const V3& b) {
             return (1 - chi2(a, b)) * chi6(a, b);
           },
           1.0 / (N1 * std::sqrt(N2)),
           [N1, N2](const V3& a, const V3& b) {
             return norm3(add3(a, b)) * N1 * N2;
           },
           {{M_PI, M_PI - t6}});

  // region 7: low band, xi2 within a narrow cone of the output axis
  add_space(7, "mixed_r7_space", band_low,
            [chi2, chi6, chi7](const V3& a, const V3& b) {
              return (1 - chi2(a, b)) * (1 - chi6(a, b)) * chi7(a, b);
            },
            1.0 / std::sqrt(N1), 1.0 / (std::sqrt(N1) * N2),
            [](const V3&, const V3&) { return 1.0; }, {{0.0, t7}},
            1e-5 * std::min(N1, N2) * w7);

  // region 8: low band remainder
  add_space(8, "mixed_r8_space", band_low,
            [chi2, chi6, chi7](const V3& a, const V3& b) {
              return (1 - chi2(a, b)) * (1 - chi6(a, b)) * (1 - chi7(a, b));
            },
            1.0 / std::sqrt(N1), 1.0 / (std::sqrt(N1) * N2),
            [N2](const V3& a, const V3& b) {
              double thp = M_PI - angle3(a, b);
              return std::max(std::sin(thp / 2),
                              N2 * std::abs(norm3(a) - norm3(b)));
            },
            {{0.0, t7}, {M_PI, M_PI - t6}},
            1e-5 * std::min(N1, N2) * w7);

  return fam;
}

// ---- sampling ---------------------------------------------------------------------

double halton(unsigned long i, int b) {
  double f = 1, r = 0;
  while (i > 0) {
    f /= b;
    r += f * (i % b);
    i /= b;
  }
  return r;
}

struct SamplePoint {
  V3 x1, x2;
};

// quasi-random points in the fattened dyadic annuli, plus structured
// adversarial points near angular degeneracies (theta12 near 0 or pi with
// nearly equal radii, where phase minima live)
std::vector<SamplePoint> support_samples(double N1, double N2, int n,
                                         unsigned long seed) {
  std::vector<SamplePoint> pts;
  pts.reserve(n + 6000);
  auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
  for (int i = 0; i < n; ++i) {
    unsigned long j = seed + i + 1;
    double r1 = lerp(N1 / 4, 2.2 * N1, halton(j, 2));
    double r2 = lerp(N2 / 4, 2.2 * N2, halton(j, 3));
    double th = std::acos(1 - 2 * halton(j, 5));
    pts.push_back({{r1, 0, 0}, {r2 * std::cos(th), r2 * std::sin(th), 0}});
  }
  std::vector<double> deltas, gammas;
  for (int k = 1; k <= 7; ++k) deltas.push_back(std::pow(10.0, -k));
  gammas = {0, 1e-6, -1e-6, 1e-3, -1e-3, 1e-2, -1e-2, 0.1, -0.1};
  for (int ir = 0; ir < 8; ++ir) {
    double r2 = lerp(N2 / 4, 2.2 * N2, (ir + 0.5) / 8);
    for (double g : gammas) {
      double r1 = r2 * (1 + g);
      if (r1 < N1 / 4 || r1 > 2.2 * N1) continue;
      for (double d : deltas) {
        for (double th : {d, M_PI - d}) {
          pts.push_back({{r1, 0, 0}, {r2 * std::cos(th), r2 * std::sin(th), 0}});
        }
      }
    }
  }
  return pts;
}

}  // namespace

RegionFamily build_region_family(PhaseType t, double N1, double N2,
                                 const AtlasConfig& cfg) {
  if (!(N1 > 0) || !(N2 > 0)) throw Error("build_region_family: dyads must be positive");
  switch (t) {
    case PhaseType::conj2: return build_conj2(N1, N2, cfg);
    case PhaseType::plain2: return build_plain2(N1, N2, cfg);
    case PhaseType::mixed: return build_mixed(N1, N2, cfg);
  }
  throw Error("build_region_family: unknown phase");
}

double partition_residual(const RegionFamily& fam, int n_samples, unsigned long seed) {
  auto pts = support_samples(fam.N1, fam.N2, n_samples, seed);
  double worst = 0;
  for (const auto& p : pts) {
    double s = 0;
    for (const auto& r : fam.regions)
      if (r.active) s += r.rho(p.x1, p.x2);
    worst = std::max(worst, std::abs(s - 1));
  }
  return worst;
}

std::vector<DenomAudit> audit_denominators(const RegionFamily& fam) {
  auto pts = support_samples(fam.N1, fam.N2, fam.cfg.n_support_samples, fam.cfg.seed);
  std::vector<DenomAudit> out;
  for (const auto& r : fam.regions) {
    if (!r.active) continue;
    DenomAudit a;
    a.region = r.index;
    a.name = r.name;
    double min_d = std::numeric_limits<double>::infinity();
    double min_q = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
      double rr = r.rho(p.x1, p.x2) * lp_psi_fat(norm3(p.x1) / fam.N1) *
                  lp_psi_fat(norm3(p.x2) / fam.N2);
      if (rr < 1e-3) continue;
      if (rr >= 0.5) ++a.n_support;
      double d = r.denom(p.x1, p.x2);
      double q = r.denom_bound(p.x1, p.x2);
      min_d = std::min(min_d, d);
      if (q > 0) min_q = std::min(min_q, d / q);
    }
    if (!std::isfinite(min_d)) min_d = 0, min_q = 0;  // no support mass seen
    a.min_denom = min_d;
    a.min_ratio = std::isfinite(min_q) ? min_q : 0;
    a.positive = a.n_support == 0 || min_d > 0;
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<OpBoundAudit> audit_multiplier_bounds(const RegionFamily& fam,
                                                  const OpNormConfig& on_cfg) {
  auto pts = support_samples(fam.N1, fam.N2, 4000, fam.cfg.seed);
  std::vector<OpBoundAudit> out;
  for (const auto& r : fam.regions) {
    if (!r.active) continue;
    double rho_max = 0;
    for (const auto& p : pts)
      rho_max = std::max(rho_max, r.rho(p.x1, p.x2) *
                                      lp_psi_fat(norm3(p.x1) / fam.N1) *
                                      lp_psi_fat(norm3(p.x2) / fam.N2));
    for (const auto& m : r.multipliers) {
      OpBoundAudit a;
      a.region = r.index;
      a.name = m.name;
      a.claimed = m.claimed;
      if (rho_max < 1e-6) {
        a.empty = true;
        out.push_back(std::move(a));
        continue;
      }
      OpNormConfig c = on_cfg;
      if (c.force_ordering < 0) c.force_ordering = m.free_slot == 1 ? 0 : 1;
      OpNormResult res = opnorm_estimate(m.sym, m.supp, c);
      a.measured = res.value;
      a.ratio = m.claimed > 0 ? res.value / m.claimed : 0;
      out.push_back(std::move(a));
    }
  }
  return out;
}

HDerivAudit h_derivative_audit(int n_samples, double r_lo, double r_hi) {
  HDerivAudit a;
  for (int k = 0; k < 4; ++k) {
    a.ratio_lo[k] = std::numeric_limits<double>::infinity();
    a.ratio_hi[k] = 0;
  }
  std::array<double (*)(double), 5> f{sym_h, sym_hp, sym_hpp, sym_hppp, sym_hpppp};
  for (int i = 0; i < n_samples; ++i) {
    double s = n_samples == 1 ? 0.5 : static_cast<double>(i) / (n_samples - 1);
    double r = r_lo * std::pow(r_hi / r_lo, s);
    double B = br(r);
    double comp[4] = {B, r / B, std::pow(B, -5.0), r * std::pow(B, -7.0)};
    for (int k = 0; k < 4; ++k) {
      // each closed-form derivative against a 4th-order difference of the
      // previous one in the chain; all the closed forms are analytic through
      // r = 0 (odd/even continuations), so the stencil may cross zero, and a
      // step proportional to <r> keeps cancellation below truncation
      double h = 0.02 * B;
      double ex = f[k + 1](r);
      // the difference quotient carries rounding noise ~ eps |f| / h; where
      // that exceeds a tiny fraction of the target derivative (high orders at
      // large r) no finite difference can resolve it, so skip the comparison
      double noise = 2.2e-16 * std::abs(f[k](r)) / h;
      if (noise < 3e-9 * std::abs(ex)) {
        auto stencil = [&](double hh) {
          return (8 * (f[k](r + hh) - f[k](r - hh)) -
                  (f[k](r + 2 * hh) - f[k](r - 2 * hh))) /
                 (12 * hh);
        };
        double fd = (16 * stencil(h / 2) - stencil(h)) / 15;
        double rel = std::abs(fd - ex) / std::abs(ex);
        a.max_rel_err = std::max(a.max_rel_err, rel);
      }
      double q = std::abs(ex) / comp[k];
      a.ratio_lo[k] = std::min(a.ratio_lo[k], q);
      a.ratio_hi[k] = std::max(a.ratio_hi[k], q);
    }
  }
  return a;
}

GradDiffAudit grad_h_difference_audit(int n_samples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0, 1);
  auto rand_vec = [&]() {
    double r = std::pow(10.0, -3 + 6 * uni(rng));
    double ct = 1 - 2 * uni(rng);
    double st = std::sqrt(std::max(0.0, 1 - ct * ct));
    double ph = 2 * M_PI * uni(rng);
    return V3{r * st * std::cos(ph), r * st * std::sin(ph), r * ct};
  };
  GradDiffAudit a;
  for (int i = 0; i < n_samples; ++i) {
    V3 x = rand_vec(), y = rand_vec();
    double rx = norm3(x), ry = norm3(y);
    double rad = std::abs(rx - ry) * std::max(rx / br(rx), ry / br(ry));
    for (int sgn = 0; sgn < 2; ++sgn) {
      V3 gy = grad_H(y);
      V3 lhs_v = sgn == 0 ? add3(grad_H(x), gy) : sub3(grad_H(x), gy);
      V3 my = sgn == 0 ? scale3(-1.0, y) : y;
      double rhs = rad + std::min(br(rx), br(ry)) * std::sin(angle3(x, my) / 2);
      if (rhs <= 0) continue;
      a.max_ratio = std::max(a.max_ratio, norm3(lhs_v) / rhs);
    }
  }
  return a;
}

double calibrate_mixed_C(const AtlasConfig& cfg, double N_lo, double N_hi,
                         int n_samples) {
  const double sep = cfg.angle_sep;
  auto chi2 = [sep](const V3& a, const V3& b) {
    return step_up(theta01(a, b), 2 * M_PI / 3, sep);
  };
  auto chi3 = [sep](const V3& a, const V3& b) {
    double th = theta02(a, b);
    return step_dn(th, M_PI / 3, sep) + step_up(th, 2 * M_PI / 3, sep);
  };
  std::vector<double> dyads;
  for (double N = N_lo; N <= N_hi * (1 + 1e-12); N *= 2) dyads.push_back(N);

  // the pointwise criterion does not depend on C, so test each dyad pair once
  auto dyad_ok = [&](double N1, double N2) {
    auto pts = support_samples(N1, N2, n_samples, cfg.seed);
    for (const auto& p : pts) {
      double rr = (1 - chi2(p.x1, p.x2)) * chi3(p.x1, p.x2) *
                  lp_psi_fat(norm3(p.x1) / N1) * lp_psi_fat(norm3(p.x2) / N2);
      if (rr < 1e-3) continue;
      double lhs = std::abs(phase(PhaseType::mixed, p.x1, p.x2));
      double rhs = 0.5 * norm3(add3(p.x1, p.x2)) * norm3(p.x2);
      if (lhs < rhs) return false;
    }
    return true;
  };

  for (double C = 1; C <= 1024; C *= 2) {
    bool ok = true;
    for (double N1 : dyads) {
      if (N1 < C) continue;
      for (double N2 : dyads) {
        if (N1 > 64 * N2) continue;
        if (!dyad_ok(N1, N2)) {
          ok = false;
          break;
        }
      }
      if (!ok) break;
    }
    if (ok) return C;
  }
  throw Error("calibrate_mixed_C: no admissible split constant up to 1024");
}

}  // namespace cqnls
