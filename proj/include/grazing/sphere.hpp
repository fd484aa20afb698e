#pragma once

#include <string>
#include <vector>

#include "grazing/grid.hpp"

namespace grazing {

enum class SphereBackend { product, lebedev };

struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to 4 pi
  int degree = 0;
};

// product: any degree >= 1 (Gauss-Legendre in cos(theta) x uniform azimuth).
// lebedev: degrees 3, 5, 7, 9, 11.
SphereQuadrature build_sphere_quadrature(int order, SphereBackend backend = SphereBackend::product);

// Real orthonormal spherical harmonics, index l*l + l + m.
int sh_index(int l, int m);
void real_spherical_harmonics(int l_max, const Vec3& unit, double* out);

class SphericalHarmonicPlan {
 public:
  // Shell radii are Gauss-Legendre nodes on (0, L]; the angular set is a
  // product rule of degree angular_degree, which must reach 2 l_max.
  SphericalHarmonicPlan(double L, int n_shells, int l_max, int angular_degree = -1);

  int l_max() const { return l_max_; }
  int n_coeff() const { return (l_max_ + 1) * (l_max_ + 1); }
  const std::vector<double>& radii() const { return radii_; }
  const std::vector<double>& radial_weights() const { return radial_w_; }
  const SphereQuadrature& angular() const { return sq_; }
  // Y table, row q = angular node, column = sh_index.
  const Eigen::MatrixXd& table() const { return Y_; }

  // Coefficients of values given at the angular nodes of one shell.
  Vector analyze(const Vector& shell_values) const;
  Vector synthesize(const Vector& coeffs) const;

 private:
  int l_max_;
  std::vector<double> radii_, radial_w_;
  SphereQuadrature sq_;
  Eigen::MatrixXd Y_;
};

DistributionField apply_anisotropic_weight(const DistributionField& f, const KernelParams& p,
                                           const SphericalHarmonicPlan& plan);

struct TripleNormParts {
  double anisotropic = 0.0;
  double fourier = 0.0;
  double phase = 0.0;
  double total() const;
};

TripleNormParts triple_norm_parts(const DistributionField& f, const KernelParams& p, double l,
                                  const SphericalHarmonicPlan& plan);
double triple_norm(const DistributionField& f, const KernelParams& p, double l,
                   const SphericalHarmonicPlan& plan);

}  // namespace grazing
