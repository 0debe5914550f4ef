#include "cqnls/field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>

namespace cqnls {

Field::Field(const Grid& g, std::vector<cplx> data) : grid(g), v(std::move(data)) {
  if (v.size() != g.size()) throw Error("field: data size does not match grid");
}

CoeffField::CoeffField(const Grid& g, std::vector<cplx> data) : grid(g), c(std::move(data)) {
  if (c.size() != g.size()) throw Error("coeff field: data size does not match grid");
}

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<cplx> buf;
};

// in-place c2c plans cached per (d, m); FFTW_ESTIMATE keeps planning
// deterministic and cheap
PlanPair& plans_for(const Grid& g) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(g.d, g.m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  PlanPair p;
  p.buf.assign(g.size(), cplx(0, 0));
  int n[3] = {g.m, g.m, g.m};
  auto* io = reinterpret_cast<fftw_complex*>(p.buf.data());
  p.fwd = fftw_plan_dft(g.d, n, io, io, FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft(g.d, n, io, io, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!p.fwd || !p.bwd) throw Error("fftw planning failed");
  return cache.emplace(key, std::move(p)).first->second;
}

}  // namespace

CoeffField to_coeff(const Field& f) {
  auto& p = plans_for(f.grid);
  p.buf = f.v;
  fftw_execute_dft(p.fwd, reinterpret_cast<fftw_complex*>(p.buf.data()),
                   reinterpret_cast<fftw_complex*>(p.buf.data()));
  CoeffField out(f.grid);
  const double scale = 1.0 / static_cast<double>(f.grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out.c[i] = p.buf[i] * scale;
  return out;
}

Field to_field(const CoeffField& c) {
  auto& p = plans_for(c.grid);
  p.buf = c.c;
  fftw_execute_dft(p.bwd, reinterpret_cast<fftw_complex*>(p.buf.data()),
                   reinterpret_cast<fftw_complex*>(p.buf.data()));
  Field out(c.grid);
  out.v = p.buf;
  return out;
}

double compensated_sum(const std::vector<double>& terms) {
  double s = 0, comp = 0;
  for (double t : terms) {
    double y = t - comp;
    double u = s + y;
    comp = (u - s) - y;
    s = u;
  }
  return s;
}

static double kahan_accumulate(const std::vector<cplx>& v, double p) {
  double s = 0, comp = 0;
  for (const auto& z : v) {
    double a = std::abs(z);
    double t = (p == 2) ? a * a : std::pow(a, p);
    double y = t - comp;
    double u = s + y;
    comp = (u - s) - y;
    s = u;
  }
  return s;
}

double lp_norm(const Field& f, double p) {
  if (p == 0) {  // sup norm
    double m = 0;
    for (const auto& z : f.v) m = std::max(m, std::abs(z));
    return m;
  }
  double s = kahan_accumulate(f.v, p);
  return std::pow(f.grid.cell_volume() * s, 1.0 / p);
}

double l2_norm(const Field& f) { return lp_norm(f, 2); }

double l2_norm(const CoeffField& c) {
  double s = kahan_accumulate(c.c, 2);
  double Ld = 1;
  for (int a = 0; a < c.grid.d; ++a) Ld *= c.grid.L;
  return std::sqrt(Ld * s);
}

Field real_part(const Field& f) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.v[i].real();
  return out;
}

Field imag_part(const Field& f) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = f.v[i].imag();
  return out;
}

Field conj_field(const Field& f) {
  Field out(f.grid);
  for (std::size_t i = 0; i < f.size(); ++i) out.v[i] = std::conj(f.v[i]);
  return out;
}

cplx mean_value(const Field& f) {
  double sr = 0, cr = 0, si = 0, ci = 0;
  for (const auto& z : f.v) {
    double yr = z.real() - cr, yi = z.imag() - ci;
    double ur = sr + yr, ui = si + yi;
    cr = (ur - sr) - yr;
    ci = (ui - si) - yi;
    sr = ur;
    si = ui;
  }
  return cplx(sr, si) / static_cast<double>(f.size());
}

#define CQNLS_CHECK_SAME_GRID(a, b) \
  if (!((a).grid == (b).grid)) throw Error("field arithmetic: grid mismatch")

Field operator+(const Field& a, const Field& b) {
  CQNLS_CHECK_SAME_GRID(a, b);
  Field out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = a.v[i] + b.v[i];
  return out;
}

Field operator-(const Field& a, const Field& b) {
  CQNLS_CHECK_SAME_GRID(a, b);
  Field out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = a.v[i] - b.v[i];
  return out;
}

Field operator*(const Field& a, const Field& b) {
  CQNLS_CHECK_SAME_GRID(a, b);
  Field out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

Field operator*(cplx s, const Field& a) {
  Field out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.v[i] = s * a.v[i];
  return out;
}

CoeffField operator+(const CoeffField& a, const CoeffField& b) {
  CQNLS_CHECK_SAME_GRID(a, b);
  CoeffField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.c[i] = a.c[i] + b.c[i];
  return out;
}

CoeffField operator-(const CoeffField& a, const CoeffField& b) {
  CQNLS_CHECK_SAME_GRID(a, b);
  CoeffField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.c[i] = a.c[i] - b.c[i];
  return out;
}

CoeffField operator*(cplx s, const CoeffField& a) {
  CoeffField out(a.grid);
  for (std::size_t i = 0; i < a.size(); ++i) out.c[i] = s * a.c[i];
  return out;
}

}  // namespace cqnls
