#pragma once
#include <vector>

namespace cqnls {

struct Quad1D {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a, b]
Quad1D gauss_legendre(int n, double a, double b);

struct GridFeature {
  double pos = 0;
  double width = 0;  // local length scale to resolve at pos
};

// Composite 4-point Gauss rule on [a, b] whose panel length shrinks to
// ~width/2 near each feature and grows geometrically away from it, capped at
// (b - a) / n_base in the bulk.
Quad1D graded_quad(double a, double b, int n_base, const std::vector<GridFeature>& features);

// local resolution scale of the graded grid at x (used to pick FD steps)
double graded_scale(double a, double b, int n_base, const std::vector<GridFeature>& features,
                    double x);

}  // namespace cqnls
