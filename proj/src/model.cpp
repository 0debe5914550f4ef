#include "cqnls/model.hpp"

#include <cmath>
#include <vector>

namespace cqnls {

NormalizedParams normalize(const RawParams& raw) {
  const double a1 = raw.alpha1, a3 = raw.alpha3, a5 = raw.alpha5;
  // p(x) = a1 - a3 x + a5 x^2,  p'(x) = -a3 + 2 a5 x
  std::vector<double> roots;
  if (a5 == 0) {
    if (a3 == 0) throw NoStableEquilibriumError("normalize: p(x) has no zero");
    roots.push_back(a1 / a3);
  } else {
    double disc = a3 * a3 - 4 * a5 * a1;
    if (disc < 0) throw NoStableEquilibriumError("normalize: p(x) has no real zero");
    double sq = std::sqrt(disc);
    if (sq <= 1e-12 * std::max(std::abs(a3), 1.0))
      throw DegenerateRootError("normalize: double root of p(x)");
    roots.push_back((a3 - sq) / (2 * a5));
    roots.push_back((a3 + sq) / (2 * a5));
  }
  for (double c2 : roots) {
    if (!(c2 > 0)) continue;
    double pp = -a3 + 2 * a5 * c2;
    if (std::abs(pp) <= 1e-12 * std::max({std::abs(a3), std::abs(a5 * c2), 1.0}))
      throw DegenerateRootError("normalize: p'(c^2) vanishes");
    if (pp > 0) {
      NormalizedParams out;
      out.beta = a5 * c2 / pp;
      out.amplitude_scale = std::sqrt(c2);
      out.time_scale = c2 * pp;
      out.space_scale = std::sqrt(out.time_scale);
      return out;
    }
  }
  throw NoStableEquilibriumError("normalize: no positive zero of p with p' > 0");
}

Field nonlinearity_N_part(const Field& u, double beta, int k) {
  if (k < 2 || k > 5) throw Error("nonlinearity_N_part: degree must be 2..5");
  Field out(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cplx z = u.v[i];
    const double u1 = z.real(), u2 = z.imag();
    const double m2 = u1 * u1 + u2 * u2;
    cplx r(0, 0);
    switch (k) {
      case 2:
        r = cplx((3 + 4 * beta) * u1 * u1 + u2 * u2, 2 * u1 * u2);
        break;
      case 3:
        r = m2 * z + 4 * beta * (m2 * u1 + z * (u1 * u1));
        break;
      case 4:
        r = beta * (m2 * m2 + 4 * m2 * z * u1);
        break;
      case 5:
        r = beta * m2 * m2 * z;
        break;
    }
    out.v[i] = r;
  }
  return out;
}

Field nonlinearity_N(const Field& u, double beta) {
  Field out(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const cplx z = u.v[i];
    const double u1 = z.real(), u2 = z.imag();
    const double m2 = u1 * u1 + u2 * u2;
    cplx r = cplx((3 + 4 * beta) * u1 * u1 + u2 * u2, 2 * u1 * u2);
    r += m2 * z + 4 * beta * (m2 * u1 + z * (u1 * u1));
    r += beta * (m2 * m2 + 4 * m2 * z * u1);
    r += beta * m2 * m2 * z;
    out.v[i] = r;
  }
  return out;
}

Field nv_of_u(const Field& u, double beta) {
  return to_field(nv_hat_of_u(u, beta, false));
}

CoeffField nv_hat_of_u(const Field& u, double beta, bool dealias_rhs) {
  Field N = nonlinearity_N(u, beta);
  CoeffField re_hat = to_coeff(real_part(N));
  CoeffField im_hat = to_coeff(imag_part(N));
  CoeffField out = op_U(re_hat);
  for (std::size_t i = 0; i < out.size(); ++i) out.c[i] += cplx(0, 1) * im_hat.c[i];
  if (dealias_rhs) out = dealias(out);
  return out;
}

VState v_from_u(const Field& u) {
  double u2_mean = mean_value(imag_part(u)).real();
  CoeffField u2_hat = to_coeff(imag_part(u));
  Field Uu2 = to_field(op_U(u2_hat));
  Field v(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    v.v[i] = cplx(u.v[i].real(), Uu2.v[i].real());
  return VState{std::move(v), u2_mean};
}

Field u_from_v(const Field& v, double u2_mean) {
  CoeffField w = to_coeff(imag_part(v));
  w.c[0] = cplx(0, 0);  // the mean of Im u travels separately as u2_mean
  Field u2 = to_field(apply_radial_multiplier(w, sym_Uinv, 0));
  Field u(v.grid);
  for (std::size_t i = 0; i < v.size(); ++i)
    u.v[i] = cplx(v.v[i].real(), u2.v[i].real() + u2_mean);
  return u;
}

double u2_mean_rhs(const Field& u, double beta) {
  double m1 = mean_value(real_part(u)).real();
  double mN = mean_value(real_part(nonlinearity_N(u, beta))).real();
  return -2 * m1 - mN;
}

double energy(const Field& psi, double beta) {
  CoeffField c = to_coeff(psi);
  std::vector<double> terms;
  terms.reserve(psi.size());
  // gradient term via Plancherel keeps it spectral-accurate
  double Ld = 1;
  for (int a = 0; a < psi.grid.d; ++a) Ld *= psi.grid.L;
  double grad2 = 0;
  {
    std::vector<double> g;
    g.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      double r = c.grid.xi_norm(i);
      g.push_back(r * r * std::norm(c.c[i]));
    }
    grad2 = Ld * compensated_sum(g);
  }
  for (std::size_t i = 0; i < psi.size(); ++i) {
    double q = std::norm(psi.v[i]) - 1.0;
    terms.push_back(0.25 * q * q + beta / 6.0 * q * q * q);
  }
  return 0.5 * grad2 + psi.grid.cell_volume() * compensated_sum(terms);
}

}  // namespace cqnls
