#pragma once

#include <functional>
#include <vector>

namespace grazing {

// Adaptive Gauss-Kronrod (31 point) over [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-13, int max_depth = 12);

// Adaptive integral split at interior breakpoints.
double integrate_pieces(const std::function<double(double)>& f, std::vector<double> points,
                        double rel_tol = 1e-13);

struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a, b].
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

}  // namespace grazing
