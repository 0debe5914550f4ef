#include "cqnls/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cqnls {

Quad1D gauss_legendre(int n, double a, double b) {
  Quad1D q;
  q.x.resize(n);
  q.w.resize(n);
  // Newton iteration from Chebyshev initial guesses
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
      }
      pp = n * (x * p0 - p1) / (x * x - 1);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.x[i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    q.w[i] = (b - a) / ((1 - x * x) * pp * pp);
  }
  return q;
}

static double local_scale(double a, double b, int n_base,
                          const std::vector<GridFeature>& features, double x) {
  double s = (b - a) / std::max(n_base, 1);
  for (const auto& f : features) {
    if (f.width <= 0) continue;
    double d = std::abs(x - f.pos);
    s = std::min(s, std::max(f.width / 2, d / 2));
  }
  return std::max(s, (b - a) * 1e-12);
}

double graded_scale(double a, double b, int n_base, const std::vector<GridFeature>& features,
                    double x) {
  return local_scale(a, b, n_base, features, x);
}

Quad1D graded_quad(double a, double b, int n_base, const std::vector<GridFeature>& features) {
  Quad1D out;
  if (!(b > a)) return out;
  double x = a;
  // greedy panel march with panel length tied to the local scale
  while (x < b) {
    double len = local_scale(a, b, n_base, features, x);
    // look ahead: do not overshoot a feature's fine zone
    double len2 = local_scale(a, b, n_base, features, std::min(b, x + len));
    len = std::min(len, 2 * len2);
    double hi = std::min(b, x + len);
    Quad1D p = gauss_legendre(4, x, hi);
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
    x = hi;
  }
  return out;
}

}  // namespace cqnls
