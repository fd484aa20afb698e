#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

namespace grazing {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

// (epsilon, gamma, eta, K, symmetrized) fixing one kernel B^{eps,gamma,eta}.
struct KernelParams {
  double epsilon = 1e-2;
  double gamma = -3.0;
  double eta = 0.0;
  double k_const = 1.0;
  bool symmetrized = true;

  void validate() const;
  double log_eps() const;  // |ln eps|
  // Upper limit of the angular support in t = sin(theta/2).
  double t_max() const;
};

inline constexpr double kSqrtHalf = 0.70710678118654752440;

// b^eps as a function of the deviation angle.
double angular_b(const KernelParams& p, double theta);
// Same function written in t = sin(theta/2).
double angular_b_t(const KernelParams& p, double t);

double kinetic_kernel(const KernelParams& p, const Vec3& u, const Vec3& sigma);

std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& v_star, const Vec3& sigma);

// Closed forms of \int b sin^k(theta/2) dsigma, k in {0,1,2}.
double angular_moment(const KernelParams& p, int k);
// The same integral by adaptive quadrature of angular_b.
double angular_moment_quadrature(const KernelParams& p, int k);

double lambda1(const KernelParams& p);
double lambda1_quadrature(const KernelParams& p);

// Radial smooth cutoff phi and annulus psi(x) = phi(x/2) - phi(x).
struct BumpPartition {
  double phi(double r) const;
  double psi(double r) const;
  // phi_{-1} = phi, phi_j(x) = psi(2^{-j} x) for j >= 0.
  double localizer(int j, double r) const;
};

class CharacteristicWeight {
 public:
  explicit CharacteristicWeight(const KernelParams& p, BumpPartition bump = {});
  double operator()(double r) const;
  double operator()(const Vec3& y) const { return (*this)(y.norm()); }
  // |ln eps|^{-1/2} eps^{-1}, the saturation value.
  double ceiling() const { return ceiling_; }
  const KernelParams& params() const { return p_; }

 private:
  KernelParams p_;
  BumpPartition bump_;
  double lg_;
  double ceiling_;
};

double characteristic_weight(const CharacteristicWeight& w, double r);
double characteristic_weight(const CharacteristicWeight& w, const Vec3& y);

double polynomial_weight(double l, double r);
double polynomial_weight(double l, const Vec3& v);

// J^eps(z), radial.
double cancellation_J(const KernelParams& p, double r);
// Same kernel in tau = sqrt(1 - r^2), which stays accurate as r -> 1.
double cancellation_J_tau(const KernelParams& p, double tau);
// S^eps_delta(z) = delta^{-3} J^eps(z / delta).
double cancellation_kernel(const KernelParams& p, const Vec3& z, double delta);
// |J^eps|_{L^1} from -8 pi^2 \int b ln cos(theta/2) sin(theta) dtheta.
double cancellation_J_l1(const KernelParams& p);
// |J^eps|_{L^1} by radial quadrature of J itself.
double cancellation_J_l1_radial(const KernelParams& p);

// a(z) = 2 pi K |z|^{gamma+2} (I - z z^T / |z|^2); gamma = -3 is the Coulomb case.
Mat3 landau_matrix(const Vec3& z, double k_const, double gamma = -3.0);

double symbol_A(const KernelParams& p, double xi_norm);

}  // namespace grazing
