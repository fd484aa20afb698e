#pragma once

// Reference implementations used only by the tests. Nothing here calls into the
// library's numerics; grids are read only for their geometry.

#include <array>
#include <functional>
#include <vector>

#include "grazing/grid.hpp"
#include "grazing/operators.hpp"

namespace oracle {

using grazing::Vec3;
using grazing::Vector;
using grazing::VelocityGrid;

// \int v1^a v2^b v3^c mu dv for the standard Maxwellian.
double gaussian_moment(int a, int b, int c);

// Gauss-Legendre rule on [lo, hi] from the Jacobi matrix eigenproblem.
void gauss_legendre(int n, double lo, double hi, std::vector<double>& x, std::vector<double>& w);

// Adaptive Simpson; slow, used only for scalar cross-checks.
double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

double maxwellian(const Vec3& v);

// Corrected trilinear value at lattice-unit position (x, y, z), written out as
// trilinear + sum_a k_a (2 f_m - f_{m+e_a} - f_{m-e_a}).
double corrected_value(const VelocityGrid& g, const Vector& f, double x, double y, double z);
// Same rule as (node, weight) pairs, for deposits.
std::vector<std::pair<int, double>> corrected_weights(const VelocityGrid& g, double x, double y, double z);

void frame(const Vec3& uh, Vec3& e1, Vec3& e2);

// Q(G, H) as the plain sum over node pairs, band nodes and azimuths, plus the
// grazing weight times the Landau reference with K = 1.
Vector boltzmann(const grazing::KernelParams& p, const grazing::AngularRule& rule,
                 const VelocityGrid& g, const Vector& G, const Vector& H);

// Q^L(G, H): one-sided differences, flux U_i = w mu_i sum_j a(v_i - v_j)
// [mu_j ghat_j D hhat_i - hhat_i mu_j D ghat_j], averaged over both sides.
Vector landau(const VelocityGrid& g, const Vector& G, const Vector& H, double k_const, double gamma,
              double eta);

struct Monomial {
  double coef;
  int a, b, c;
};
using Polynomial = std::vector<Monomial>;

// <p sqrt(mu), q sqrt(mu)> in closed form.
double gram_entry(const Polynomial& p, const Polynomial& q);
// 1, v_i, v_i^2, v1v2, v2v3, v3v1, |v|^2 v_i.
std::vector<Polynomial> thirteen_polynomials();

}  // namespace oracle
