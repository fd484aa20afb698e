#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "grazing/grid.hpp"

namespace grazing {

// Angular rule for the large-angle band t = sin(theta/2) in [max(eps, split), t_max].
// The grazing band [eps, split] is carried by its leading-order (Landau) term.
struct AngularRule {
  int n_t = 4;     // Gauss-Legendre nodes in ln t
  int n_phi = 8;   // uniform azimuth nodes, even
  double split = 0.25;
  void validate() const;
};

enum class Model { boltzmann, landau };

struct CollisionModel {
  Model kind = Model::boltzmann;
  KernelParams params;
  AngularRule rule;
  int threads = 1;

  static CollisionModel boltzmann(const KernelParams& p, AngularRule r = {}) {
    return {Model::boltzmann, p, r, 1};
  }
  // Landau operator with constant p.k_const, exponent p.gamma and truncation p.eta.
  static CollisionModel landau(const KernelParams& p) { return {Model::landau, p, {}, 1}; }
};

// Weight of the Landau term inside the Boltzmann model: ln(split/eps)/|ln eps|,
// zero when eps >= split.
double grazing_coefficient(const KernelParams& p, const AngularRule& r);

// Quadrature nodes of the large-angle band. weight[k] includes b^eps and d sigma.
struct BandRule {
  std::vector<double> cos_theta, sin_theta, cos_phi, sin_phi, weight;
  int size() const { return static_cast<int>(weight.size()); }
};
BandRule band_rule(const KernelParams& p, const AngularRule& r);

// Orthonormal frame (e1, e2) around u_hat; frame(-u) = (-e1, e2).
void collision_frame(const Vec3& u_hat, Vec3& e1, Vec3& e2);

// Q(G, H) with G = mu ghat, H = mu hhat, on the lattice.
Vector collision_core(const CollisionModel& m, const VelocityGrid& g, const Vector& ghat,
                      const Vector& hhat);

DistributionField collision_bilinear(const KernelParams& p, const DistributionField& g,
                                     const DistributionField& h, const AngularRule& rule = {});
DistributionField landau_bilinear(const DistributionField& g, const DistributionField& h,
                                  double k_const, double gamma = -3.0, double eta = 0.0);
DistributionField collision_apply(const CollisionModel& m, const DistributionField& g,
                                  const DistributionField& h);

DistributionField gamma_bilinear(const CollisionModel& m, const DistributionField& g,
                                 const DistributionField& h);
DistributionField linearized_apply(const CollisionModel& m, const DistributionField& f);

// Gamma(g, h) - Q(mu^{1/2} g, h).
DistributionField remainder_I(const CollisionModel& m, const DistributionField& g,
                              const DistributionField& h);

double dissipation_functional(const CollisionModel& m, const DistributionField& g,
                              const DistributionField& h);

enum class WeakMode { grid_field, direct, monte_carlo };

struct WeakFormSpec {
  KernelParams params;
  WeakMode mode = WeakMode::grid_field;
  AngularRule rule;               // grid_field mode
  int direct_n_t = 24;            // direct mode, nodes in ln t over [eps, t_max]
  int direct_n_phi = 16;
  std::uint64_t seed = 1;         // monte_carlo mode
  std::int64_t samples = 200000;
};

// <Q(G, H), chi> for lattice fields G, H and an analytic test function chi.
double weak_form(const WeakFormSpec& spec, const DistributionField& G, const DistributionField& H,
                 const std::function<double(const Vec3&)>& chi);

struct CancellationResolution {
  int n_radial = 24;        // |u| nodes on [delta, r_max]
  int dir_degree = 13;      // product rule degree for u_hat
  int n_t = 16;             // ln t nodes per band
  int n_phi = 12;
  int n_z = 24;             // nodes per piece of the S_delta support
  double r_max = 14.0;
};

struct CancellationResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error() const;
};

// lhs = \int B^{eps,gamma,delta} g_* (h' - h), rhs = \int S_delta(v - v_*) g_* h.
// The v_* integral runs over the lattice; u, sigma and z by tensor quadrature.
CancellationResult cancellation_identity(const KernelParams& p,
                                         const std::function<double(const Vec3&)>& g,
                                         const std::function<double(const Vec3&)>& h,
                                         const VelocityGrid& grid, double delta,
                                         const CancellationResolution& res = {});

// <W_l (Gamma^L - Gamma^eps)(g, h), f>.
double operator_difference(const KernelParams& p, const DistributionField& g,
                           const DistributionField& h, const DistributionField& f, double l,
                           const AngularRule& rule = {});

// Fixed-chunk parallel loop: fn(chunk) for chunk in [0, n_chunks).
void parallel_chunks(int n_chunks, int threads, const std::function<void(int)>& fn);

}  // namespace grazing
