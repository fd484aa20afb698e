#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "grazing/spectral.hpp"

namespace grazing {

enum class Scheme { rk4, exponential };

struct EvolutionConfig {
  double dt = 0.25;
  double t_end = 5.0;
  Scheme scheme = Scheme::exponential;
  int monitor_every = 1;       // steps between monitor samples
  KernelParams params;
  AngularRule rule;
  bool landau = false;         // evolve with L^L, Gamma^L instead
  double L = 6.0;
  int n = 8;
  double max_initial_norm = 0.1;  // small-data threshold on ||f0||
  double moment_tol = 1e-8;       // initial moments must vanish to this
  int threads = 1;
  void validate() const;
};

struct CflViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BlowUp : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exp(-t M) through the symmetric eigendecomposition of M.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const LinearOperatorMatrix& M);
  Vector apply(const Vector& f, double t) const;
  DistributionField apply(const DistributionField& f, double t) const;
  const Vector& eigenvalues() const { return lambda_; }
  double spectral_radius() const;

 private:
  VelocityGrid grid_;
  Matrix V_;
  Vector lambda_;
};

DistributionField evolve_linear(const LinearOperatorMatrix& M, const DistributionField& f0, double t);

struct MonitorSample {
  double t = 0.0;
  double norm = 0.0;               // ||f||_{L^2}
  double micro_norm = 0.0;         // ||(I - P) f||
  std::array<double, 5> moments{}; // F = mu + sqrt(mu) f against 1, v, |v|^2
  double min_F = 0.0;
};

struct Trajectory {
  std::vector<MonitorSample> samples;
  DistributionField final_state;
  double max_moment_drift = 0.0;   // relative to the mass of F
  double min_F = 0.0;
  double max_norm_growth = 0.0;    // max over samples of ||f(t)|| / min_{s<t} ||f(s)|| - 1
  int steps = 0;
};

// Moments of F = mu + sqrt(mu) f against {1, v1, v2, v3, |v|^2}.
std::array<double, 5> perturbation_moments(const DistributionField& f);

// d_t f + L f = Gamma(f, f), homogeneous in x. When M is given it must be the
// assembled linearized matrix on cfg's grid; otherwise it is assembled here.
Trajectory evolve_nonlinear(const EvolutionConfig& cfg, const DistributionField& f0,
                            const LinearOperatorMatrix* M = nullptr);

}  // namespace grazing
