#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "grazing/kernel.hpp"

namespace grazing {

using Vector = Eigen::VectorXd;

// Cell-centred lattice: v_i = -L + (i + 1/2) h, h = 2L/n, on each axis.
class VelocityGrid {
 public:
  VelocityGrid() = default;
  VelocityGrid(double L, int n);

  double L() const { return L_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double weight() const { return h_ * h_ * h_; }
  int size() const { return n_ * n_ * n_; }

  int index(int ix, int iy, int iz) const { return (ix * n_ + iy) * n_ + iz; }
  std::array<int, 3> multi_index(int k) const { return {k / (n_ * n_), (k / n_) % n_, k % n_}; }
  double coord(int i) const { return -L_ + (i + 0.5) * h_; }
  Vec3 node(int k) const {
    auto m = multi_index(k);
    return {coord(m[0]), coord(m[1]), coord(m[2])};
  }
  // Position of x in lattice units along one axis (node i sits at i).
  double lattice_coord(double x) const { return (x + L_) / h_ - 0.5; }

  bool operator==(const VelocityGrid& o) const { return L_ == o.L_ && n_ == o.n_; }
  bool operator!=(const VelocityGrid& o) const { return !(*this == o); }

 private:
  double L_ = 0.0;
  int n_ = 0;
  double h_ = 0.0;
};

VelocityGrid build_velocity_grid(double L, int n);

enum class FieldRole : std::uint32_t { density = 0, perturbation = 1, basis = 2, weight = 3 };

const char* role_name(FieldRole r);

struct DistributionField {
  VelocityGrid grid;
  Vector values;
  FieldRole role = FieldRole::perturbation;

  DistributionField() = default;
  DistributionField(const VelocityGrid& g, FieldRole r = FieldRole::perturbation)
      : grid(g), values(Vector::Zero(g.size())), role(r) {}
  DistributionField(const VelocityGrid& g, Vector v, FieldRole r = FieldRole::perturbation);

  double operator[](int k) const { return values[k]; }
  double& operator[](int k) { return values[k]; }
};

struct GridMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
void require_same_grid(const DistributionField& a, const DistributionField& b);

DistributionField sample(const VelocityGrid& g, const std::function<double(const Vec3&)>& f,
                         FieldRole role = FieldRole::perturbation);
DistributionField maxwellian(const VelocityGrid& g);
double maxwellian_value(const Vec3& v);

// Discrete L^2 inner product sum f g h^3.
double inner(const DistributionField& a, const DistributionField& b);

double weighted_l2_norm(const DistributionField& f, double l);

// Trilinear interpolation on the (box-clamped) cell plus a second-difference
// correction at the nearest interior node. Exact for polynomials of degree <= 2;
// this is the off-lattice rule used by the collision operators.
double interpolate_corrected(const VelocityGrid& g, const double* values, const Vec3& x);

// Trilinear interpolation with zero extension outside the lattice.
double interpolate_trilinear(const VelocityGrid& g, const double* values, const Vec3& x);

DistributionField apply_fourier_weight(const DistributionField& f, const KernelParams& p);
DistributionField apply_phase_weight(const DistributionField& f, const KernelParams& p);
DistributionField apply_polynomial_weight(const DistributionField& f, double l);

// Binary layout: "GZFD", u32 version, f64 L, u32 n, u32 role, n^3 f64 values
// (row-major, z fastest), little-endian.
void write_field_binary(const DistributionField& f, const std::string& path);
DistributionField read_field_binary(const std::string& path);
void write_field_csv(const DistributionField& f, const std::string& path);

}  // namespace grazing
