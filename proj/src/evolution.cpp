#include "cqnls/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace cqnls {

Field default_initial_u(const Grid& g, double eps, double sigma) {
  Field u(g);
  const cplx amp = eps * cplx(1, 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto x = g.x(i);
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    u.v[i] = amp * std::exp(-r2 / (sigma * sigma));
  }
  return u;
}

static void check_finite(const Field& psi, double threshold) {
  for (const auto& z : psi.v) {
    double a = std::abs(z);
    if (!std::isfinite(a) || a > threshold)
      throw FieldBlowupError("field amplitude left the trusted range");
  }
}

namespace {

// phases of e^{i t Laplacian}, cached per (grid shape, L, t)
const std::vector<cplx>& free_phase_table(const Grid& g, double t) {
  static std::map<std::tuple<int, int, double, double>, std::vector<cplx>> cache;
  auto key = std::make_tuple(g.d, g.m, g.L, t);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> ph(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = g.xi_norm(i);
    ph[i] = std::exp(cplx(0, -t * r * r));
  }
  return cache.emplace(key, std::move(ph)).first->second;
}

}  // namespace

void step_strang_psi(Field& psi, double dt, double beta, bool nonlinear) {
  const auto& ph = free_phase_table(psi.grid, dt / 2);
  auto half_lap = [&](Field& f) {
    CoeffField c = to_coeff(f);
    for (std::size_t i = 0; i < c.size(); ++i) c.c[i] *= ph[i];
    f = to_field(c);
  };
  half_lap(psi);
  if (nonlinear) {
    for (auto& z : psi.v) {
      double q = std::norm(z) - 1.0;
      z *= std::exp(cplx(0, -dt * q * (beta * q + 1.0)));
    }
  }
  half_lap(psi);
}

namespace {

struct Deriv {
  CoeffField dv;
  double dm;
};

// flat index of the reflected mode -k, cached per grid shape
const std::vector<std::size_t>& reflect_table(const Grid& g) {
  static std::map<std::pair<int, int>, std::vector<std::size_t>> cache;
  auto key = std::make_pair(g.d, g.m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::size_t> r(g.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    auto idx = g.unflatten(i);
    std::size_t j = 0;
    for (int a = 0; a < g.d; ++a) j = j * g.m + (g.m - idx[a]) % g.m;
    r[i] = j;
  }
  return cache.emplace(key, std::move(r)).first->second;
}

// per-mode symbol tables and half/full-step propagator phases, cached per
// (grid shape, L, dt)
struct StepTables {
  std::vector<double> u, uinv;  // U(|xi|), U^{-1}(|xi|) (0 at the zero mode)
  std::vector<cplx> eh, e1;     // e^{-i dt/2 H}, e^{-i dt H}
};

const StepTables& step_tables(const Grid& g, double dt) {
  static std::map<std::tuple<int, int, double, double>, StepTables> cache;
  auto key = std::make_tuple(g.d, g.m, g.L, dt);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  StepTables t;
  t.u.resize(g.size());
  t.uinv.resize(g.size());
  t.eh.resize(g.size());
  t.e1.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r = g.xi_norm(i);
    t.u[i] = sym_U(r);
    t.uinv[i] = r == 0 ? 0.0 : sym_Uinv(r);
    double h = sym_h(r);
    t.eh[i] = std::exp(cplx(0, -dt / 2 * h));
    t.e1[i] = std::exp(cplx(0, -dt * h));
  }
  return cache.emplace(key, std::move(t)).first->second;
}

// g-frame derivative: dv/dt restricted to the nonlinear part, -i N_v(u).
// Equivalent to u_from_v / nv_hat_of_u, but splits real and imaginary parts
// spectrally (hat(Re f)(k) = (fhat(k) + conj(fhat(-k)))/2) so each stage costs
// one inverse and one forward transform.
Deriv rhs(const StateV& st, double beta, bool dealias_rhs, const StepTables& tab) {
  const Grid& g = st.vhat.grid;
  const auto& refl = reflect_table(g);

  CoeffField uh(g);
  for (std::size_t i = 0; i < uh.size(); ++i) {
    cplx a = st.vhat.c[i], b = std::conj(st.vhat.c[refl[i]]);
    cplx u1h = 0.5 * (a + b);
    cplx u2h = (a - b) / cplx(0, 2);
    uh.c[i] = u1h + cplx(0, 1) * tab.uinv[i] * u2h;
  }
  uh.c[0] += cplx(0, st.u2_mean);
  Field u = to_field(uh);

  Field N = nonlinearity_N(u, beta);
  CoeffField Nh = to_coeff(N);
  double mN = Nh.c[0].real();
  double m1 = uh.c[0].real();

  Deriv d{CoeffField(g), -2 * m1 - mN};
  for (std::size_t i = 0; i < Nh.size(); ++i) {
    cplx a = Nh.c[i], b = std::conj(Nh.c[refl[i]]);
    cplx nv = tab.u[i] * 0.5 * (a + b) + 0.5 * (a - b);
    d.dv.c[i] = cplx(0, -1) * nv;
  }
  if (dealias_rhs) d.dv = dealias(d.dv);
  return d;
}

CoeffField axpy(const CoeffField& a, double s, const CoeffField& b) {
  CoeffField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.c[i] = a.c[i] + s * b.c[i];
  return out;
}

}  // namespace

void step_ifrk4_v(StateV& st, double dt, double beta, bool dealias_rhs, bool nonlinear) {
  if (!nonlinear) {
    // mean(u1) = Re vhat(0) is constant under the propagator, so the
    // companion ODE mean(u2)' = -2 mean(u1) integrates exactly
    st.u2_mean -= 2.0 * dt * st.vhat.c[0].real();
    st.vhat = op_propagator(st.vhat, dt);
    return;
  }
  const StepTables& tab = step_tables(st.vhat.grid, dt);
  auto mul = [&](const CoeffField& c, const std::vector<cplx>& ph) {
    CoeffField out(c.grid);
    for (std::size_t i = 0; i < c.size(); ++i) out.c[i] = ph[i] * c.c[i];
    return out;
  };
  auto Eh = [&](const CoeffField& c) { return mul(c, tab.eh); };
  auto E1 = [&](const CoeffField& c) { return mul(c, tab.e1); };

  Deriv k1 = rhs(st, beta, dealias_rhs, tab);
  StateV s2{Eh(axpy(st.vhat, dt / 2, k1.dv)), st.u2_mean + dt / 2 * k1.dm};
  Deriv k2 = rhs(s2, beta, dealias_rhs, tab);
  StateV s3{axpy(Eh(st.vhat), dt / 2, k2.dv), st.u2_mean + dt / 2 * k2.dm};
  Deriv k3 = rhs(s3, beta, dealias_rhs, tab);
  StateV s4{axpy(E1(st.vhat), dt, Eh(k3.dv)), st.u2_mean + dt * k3.dm};
  Deriv k4 = rhs(s4, beta, dealias_rhs, tab);

  CoeffField vn = E1(st.vhat);
  CoeffField e1k1 = E1(k1.dv);
  CoeffField ehk2 = Eh(k2.dv);
  CoeffField ehk3 = Eh(k3.dv);
  for (std::size_t i = 0; i < vn.size(); ++i)
    vn.c[i] += dt / 6.0 * (e1k1.c[i] + 2.0 * ehk2.c[i] + 2.0 * ehk3.c[i] + k4.dv.c[i]);
  st.vhat = std::move(vn);
  st.u2_mean += dt / 6.0 * (k1.dm + 2 * k2.dm + 2 * k3.dm + k4.dm);
}

Trajectory run(const SimConfig& cfg, const Field* u0_override) {
  Grid g(cfg.d, cfg.m, cfg.L);
  Field u0 = u0_override ? *u0_override : default_initial_u(g, cfg.eps, cfg.sigma);
  if (!(u0.grid == g)) throw Error("run: initial data grid mismatch");

  const bool do_strang = cfg.solver == Solver::strang || cfg.solver == Solver::both;
  const bool do_ifrk4 = cfg.solver == Solver::ifrk4 || cfg.solver == Solver::both;

  Field psi(g);
  for (std::size_t i = 0; i < psi.size(); ++i) psi.v[i] = 1.0 + u0.v[i];
  VState v0 = v_from_u(u0);
  StateV sv{to_coeff(v0.v), v0.u2_mean};

  const long nsteps = std::lround(cfg.t_end / cfg.dt);
  Trajectory traj;
  auto snap_left = cfg.snapshot_times;
  std::sort(snap_left.begin(), snap_left.end());

  auto record = [&](long step) {
    double t = step * cfg.dt;
    DiagRow row;
    row.t = t;
    if (do_strang) {
      row.energy = energy(psi, cfg.beta);
      Field u(g);
      for (std::size_t i = 0; i < u.size(); ++i) u.v[i] = psi.v[i] - 1.0;
      row.l2_u = l2_norm(u);
      row.boundary_frac = boundary_mass_fraction(u);
    }
    if (do_ifrk4) {
      Field v = to_field(sv.vhat);
      row.l6_v = lp_norm(v, 6);
      CoeffField w = to_coeff(imag_part(v));
      w.c[0] = cplx(0, 0);
      Field uiv(g);
      {
        Field re = real_part(v);
        Field im = to_field(apply_radial_multiplier(w, sym_Uinv, 0));
        for (std::size_t i = 0; i < uiv.size(); ++i)
          uiv.v[i] = cplx(re.v[i].real(), im.v[i].real());
      }
      row.l6_uinv_v = lp_norm(uiv, 6);
      row.u2_mean = sv.u2_mean;
      row.zero_amp = std::abs(sv.vhat.c[0]);
      if (!do_strang) {
        Field u = u_from_v(v, sv.u2_mean);
        row.l2_u = l2_norm(u);
        row.boundary_frac = boundary_mass_fraction(u);
        Field psi_v(g);
        for (std::size_t i = 0; i < u.size(); ++i) psi_v.v[i] = 1.0 + u.v[i];
        row.energy = energy(psi_v, cfg.beta);
      }
    }
    if (do_strang && do_ifrk4) {
      Field u_v = u_from_v(to_field(sv.vhat), sv.u2_mean);
      Field u_s(g);
      for (std::size_t i = 0; i < u_s.size(); ++i) u_s.v[i] = psi.v[i] - 1.0;
      double ref = l2_norm(u_s);
      row.cross_diff = ref > 0 ? l2_norm(u_s - u_v) / ref : 0.0;
      traj.max_cross_diff = std::max(traj.max_cross_diff, row.cross_diff);
    }
    traj.diagnostics.push_back(row);
  };

  auto maybe_snapshot = [&](long step) {
    double t = step * cfg.dt;
    while (!snap_left.empty() && snap_left.front() <= t + cfg.dt / 2) {
      Snapshot s{t, do_ifrk4 ? to_field(sv.vhat) : v_from_u([&] {
                   Field u(g);
                   for (std::size_t i = 0; i < u.size(); ++i) u.v[i] = psi.v[i] - 1.0;
                   return u;
                 }()).v,
                 do_ifrk4 ? sv.u2_mean : 0.0};
      if (!do_ifrk4) {
        Field u(g);
        for (std::size_t i = 0; i < u.size(); ++i) u.v[i] = psi.v[i] - 1.0;
        s.u2_mean = v_from_u(u).u2_mean;
      }
      traj.snapshots.push_back(std::move(s));
      snap_left.erase(snap_left.begin());
    }
  };

  record(0);
  maybe_snapshot(0);
  for (long step = 1; step <= nsteps; ++step) {
    if (do_strang) step_strang_psi(psi, cfg.dt, cfg.beta, cfg.nonlinear);
    if (do_ifrk4) {
      step_ifrk4_v(sv, cfg.dt, cfg.beta, cfg.dealias_rhs, cfg.nonlinear);
      if (cfg.zero_mode == ZeroModePolicy::project) {
        sv.vhat.c[0] = cplx(0, 0);
        sv.u2_mean = 0;
      }
    }
    if (step % 50 == 0 || step == nsteps) {
      if (do_strang) check_finite(psi, cfg.blowup_threshold);
      if (do_ifrk4 && !std::isfinite(std::abs(sv.vhat.c[0])))
        throw FieldBlowupError("v solver produced non-finite data");
    }
    if (step % cfg.diag_every == 0 || step == nsteps) record(step);
    maybe_snapshot(step);
  }
  if (do_strang) traj.psi_final = psi;
  if (do_ifrk4) traj.v_final = sv;
  return traj;
}

}  // namespace cqnls
