#pragma once

#include <array>
#include <string>
#include <vector>

#include "grazing/operators.hpp"
#include "grazing/sphere.hpp"

namespace grazing {

using Matrix = Eigen::MatrixXd;

struct ProjectionBasis {
  VelocityGrid grid;
  std::array<Vector, 5> e;   // discretely orthonormal
  std::array<Vector, 5> raw; // sqrt(mu) {1, v1, v2, v3, |v|^2}
};
ProjectionBasis build_projection_basis(const VelocityGrid& g);

struct MacroState {
  double a = 0.0;
  Vec3 b = Vec3::Zero();
  double c = 0.0;
};

struct Projection {
  DistributionField field;
  MacroState macro;
};
Projection project_null(const ProjectionBasis& basis, const DistributionField& f);

struct ThirteenMomentBasis {
  VelocityGrid grid;
  std::array<Vector, 13> e;
};
ThirteenMomentBasis build_thirteen_moment_basis(const VelocityGrid& g);
Matrix gram_matrix(const ThirteenMomentBasis& b);

struct LinearOperatorMatrix {
  VelocityGrid grid;
  Matrix M;               // (L f)_i = sum_j M_ij f_j
  double asymmetry = 0.0; // ||M - M^T|| / ||M|| before symmetrization
  std::string label;
};

struct ResourceGuard : std::runtime_error {
  using std::runtime_error::runtime_error;
};
inline constexpr int kMaxAssemblyNodes = 24 * 24 * 24;

// Direct assembly from the symmetric quadratic form.
LinearOperatorMatrix assemble_linearized(const CollisionModel& m, const VelocityGrid& g);
// Column j = linearized_apply(delta_j), for the listed columns (all if empty).
Matrix assemble_columns(const CollisionModel& m, const VelocityGrid& g, const std::vector<int>& cols = {});

// Pieces that combine into L^eps for every eps below the split:
// L^eps = c(eps) L^L_{K=1} + |ln eps|^{-1} L^{band}.
class LinearizedFamily {
 public:
  LinearizedFamily(const VelocityGrid& g, double gamma, double eta, const AngularRule& rule,
                   bool symmetrized = true);
  LinearOperatorMatrix boltzmann(double epsilon) const;
  LinearOperatorMatrix landau(double k_const = 1.0) const;
  const VelocityGrid& grid() const { return grid_; }

 private:
  VelocityGrid grid_;
  double gamma_, eta_;
  AngularRule rule_;
  bool symmetrized_;
  Matrix landau_unit_;
  Matrix band_raw_;
};

double operator_norm(const Matrix& M);  // spectral norm of a symmetric matrix

Vector eigenvalues(const Matrix& M);

// Smallest eigenvalue of <Mf,f>/|f|^2_{L^2_{gamma/2}} over f orthogonal to e_1..e_5.
double spectral_gap(const LinearOperatorMatrix& M, const ProjectionBasis& basis, double gamma);

struct CoercivityReport {
  double nu0 = 0.0;
  int argmin = -1;
  std::vector<double> ratios;
};
// Probe family: Hermite tensor functions times sqrt(mu) up to total degree 6,
// plus seeded random smooth fields.
std::vector<DistributionField> coercivity_family(const VelocityGrid& g, std::uint64_t seed,
                                                 int n_random = 32, int max_degree = 6);
CoercivityReport coercivity_constant(const LinearOperatorMatrix& M, const KernelParams& p, double l,
                                     const SphericalHarmonicPlan& plan,
                                     const std::vector<DistributionField>& family);

// Binary: "GZMX", u32 version, u64 dim, dim^2 f64 row-major.
void write_matrix_binary(const Matrix& M, const std::string& path);
Matrix read_matrix_binary(const std::string& path);
void write_spectrum_csv(const Vector& ev, const std::string& path);

}  // namespace grazing
