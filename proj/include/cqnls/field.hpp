#pragma once
#include <complex>
#include <vector>

#include "cqnls/grid.hpp"

namespace cqnls {

using cplx = std::complex<double>;

// Physical-space samples f(x_j) on the grid, row-major, axis 0 slowest.
struct Field {
  Grid grid;
  std::vector<cplx> v;

  explicit Field(const Grid& g) : grid(g), v(g.size(), cplx(0, 0)) {}
  Field(const Grid& g, std::vector<cplx> data);

  cplx& operator[](std::size_t i) { return v[i]; }
  const cplx& operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

// Fourier coefficients c_k of the expansion f(x) = sum_k c_k e^{i xi_k . x},
// standard FFT ordering per axis.
struct CoeffField {
  Grid grid;
  std::vector<cplx> c;

  explicit CoeffField(const Grid& g) : grid(g), c(g.size(), cplx(0, 0)) {}
  CoeffField(const Grid& g, std::vector<cplx> data);

  cplx& operator[](std::size_t i) { return c[i]; }
  const cplx& operator[](std::size_t i) const { return c[i]; }
  std::size_t size() const { return c.size(); }
};

// transforms (FFTW underneath; plans cached per grid shape)
CoeffField to_coeff(const Field& f);
Field to_field(const CoeffField& c);

// deterministic compensated (Kahan) summation
double compensated_sum(const std::vector<double>& terms);

// physical L^p norms: (h^d sum |f|^p)^{1/p}; p = 0 means sup norm
double lp_norm(const Field& f, double p);
double l2_norm(const Field& f);
// coefficient-side L^2 norm: sqrt(L^d sum |c_k|^2)  (Plancherel partner of l2_norm)
double l2_norm(const CoeffField& c);

// pointwise helpers
Field real_part(const Field& f);
Field imag_part(const Field& f);
Field conj_field(const Field& f);
cplx mean_value(const Field& f);

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);  // pointwise
Field operator*(cplx s, const Field& a);
CoeffField operator+(const CoeffField& a, const CoeffField& b);
CoeffField operator-(const CoeffField& a, const CoeffField& b);
CoeffField operator*(cplx s, const CoeffField& a);

}  // namespace cqnls
