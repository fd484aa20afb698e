#include "grazing/evolve.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace grazing {

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("evolution: dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("evolution: t_end must be >= 0");
  if (monitor_every < 1) throw std::invalid_argument("evolution: monitor cadence must be >= 1");
  if (!(max_initial_norm > 0.0)) throw std::invalid_argument("evolution: small-data threshold must be positive");
  params.validate();
  if (!landau) rule.validate();
}

SpectralPropagator::SpectralPropagator(const LinearOperatorMatrix& M) : grid_(M.grid) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M.M);
  if (es.info() != Eigen::Success) throw std::runtime_error("propagator: eigensolver failed");
  V_ = es.eigenvectors();
  lambda_ = es.eigenvalues();
}

Vector SpectralPropagator::apply(const Vector& f, double t) const {
  if (t < 0.0) throw std::invalid_argument("propagator: t must be >= 0");
  Vector c = V_.transpose() * f;
  for (int k = 0; k < c.size(); ++k) c[k] *= std::exp(-t * lambda_[k]);
  return V_ * c;
}

DistributionField SpectralPropagator::apply(const DistributionField& f, double t) const {
  if (f.grid != grid_) throw GridMismatch("propagator: grid mismatch");
  return DistributionField(grid_, apply(f.values, t), f.role);
}

double SpectralPropagator::spectral_radius() const {
  return std::max(std::abs(lambda_[0]), std::abs(lambda_[lambda_.size() - 1]));
}

DistributionField evolve_linear(const LinearOperatorMatrix& M, const DistributionField& f0, double t) {
  if (t < 0.0) throw std::invalid_argument("evolve_linear: t must be >= 0");
  if (t == 0.0) return f0;
  return SpectralPropagator(M).apply(f0, t);
}

std::array<double, 5> perturbation_moments(const DistributionField& f) {
  const VelocityGrid& g = f.grid;
  std::array<double, 5> m{};
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    const double mu = maxwellian_value(v);
    const double F = (mu + std::sqrt(mu) * f[k]) * g.weight();
    m[0] += F;
    m[1] += F * v[0];
    m[2] += F * v[1];
    m[3] += F * v[2];
    m[4] += F * v.squaredNorm();
  }
  return m;
}

namespace {

double l2(const Vector& f, double w) { return std::sqrt(f.squaredNorm() * w); }

double min_density(const DistributionField& f) {
  double lo = std::numeric_limits<double>::infinity();
  for (int k = 0; k < f.grid.size(); ++k) {
    const double mu = maxwellian_value(f.grid.node(k));
    lo = std::min(lo, mu + std::sqrt(mu) * f[k]);
  }
  return lo;
}

}  // namespace

Trajectory evolve_nonlinear(const EvolutionConfig& cfg, const DistributionField& f0,
                            const LinearOperatorMatrix* Mp) {
  cfg.validate();
  const VelocityGrid grid(cfg.L, cfg.n);
  if (f0.grid != grid) throw GridMismatch("evolve_nonlinear: f0 is not on the configured grid");
  const double w = grid.weight();
  const ProjectionBasis basis = build_projection_basis(grid);

  const double n0 = l2(f0.values, w);
  if (n0 > cfg.max_initial_norm)
    throw std::invalid_argument("evolve_nonlinear: initial data above the small-data threshold");
  for (int k = 0; k < 5; ++k) {
    const double m = std::abs(basis.raw[k].dot(f0.values) * w);
    if (m > cfg.moment_tol)
      throw std::invalid_argument("evolve_nonlinear: initial moments do not vanish");
  }

  CollisionModel model = cfg.landau ? CollisionModel::landau(cfg.params)
                                    : CollisionModel::boltzmann(cfg.params, cfg.rule);
  model.threads = cfg.threads;
  LinearOperatorMatrix own;
  if (!Mp) {
    own = assemble_linearized(model, grid);
    Mp = &own;
  }
  if (Mp->grid != grid) throw GridMismatch("evolve_nonlinear: matrix grid mismatch");
  const Matrix& M = Mp->M;
  const SpectralPropagator prop(*Mp);

  const double h = cfg.dt;
  if (cfg.scheme == Scheme::rk4 && h > 1.5 / prop.spectral_radius())
    throw CflViolation("evolve_nonlinear: dt exceeds 1.5 / spectral radius for rk4");

  auto N = [&](const Vector& f) {
    if (f.isZero(0.0)) return Vector(Vector::Zero(f.size()));
    DistributionField ff(grid, f);
    return Vector(gamma_bilinear(model, ff, ff).values);
  };
  auto E = [&](const Vector& f, double t) { return prop.apply(f, t); };

  Trajectory tr;
  const std::array<double, 5> m0 = perturbation_moments(f0);
  double running_min = n0;
  auto monitor = [&](double t, const Vector& f) {
    MonitorSample s;
    s.t = t;
    DistributionField ff(grid, f);
    s.norm = l2(f, w);
    s.micro_norm = l2(f - project_null(basis, ff).field.values, w);
    s.moments = perturbation_moments(ff);
    s.min_F = min_density(ff);
    for (int k = 0; k < 5; ++k)
      tr.max_moment_drift = std::max(tr.max_moment_drift, std::abs(s.moments[k] - m0[k]) / m0[0]);
    tr.min_F = tr.samples.empty() ? s.min_F : std::min(tr.min_F, s.min_F);
    if (running_min > 0.0) tr.max_norm_growth = std::max(tr.max_norm_growth, s.norm / running_min - 1.0);
    running_min = std::min(running_min, s.norm);
    tr.samples.push_back(s);
  };

  Vector f = f0.values;
  monitor(0.0, f);
  const int steps = static_cast<int>(std::ceil(cfg.t_end / h - 1e-12));
  double t = 0.0;
  for (int s = 0; s < steps; ++s) {
    const double dt = std::min(h, cfg.t_end - t);
    Vector next;
    if (cfg.scheme == Scheme::rk4) {
      auto rhs = [&](const Vector& y) { return Vector(-(M * y) + N(y)); };
      const Vector k1 = rhs(f);
      const Vector k2 = rhs(f + 0.5 * dt * k1);
      const Vector k3 = rhs(f + 0.5 * dt * k2);
      const Vector k4 = rhs(f + dt * k3);
      next = f + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } else {
      // Lawson RK4 in the frame of exp(-t M)
      const Vector Ef = E(f, 0.5 * dt);
      const Vector k1 = N(f);
      const Vector k2 = N(E(f + 0.5 * dt * k1, 0.5 * dt));
      const Vector k3 = N(Ef + 0.5 * dt * k2);
      const Vector k4 = N(E(Ef, 0.5 * dt) + dt * E(k3, 0.5 * dt));
      next = E(Ef, 0.5 * dt) + dt / 6.0 * (E(k1, dt) + 2.0 * E(k2 + k3, 0.5 * dt) + k4);
    }
    const double before = l2(f, w), after = l2(next, w);
    if (!std::isfinite(after) || (before > 0.0 && after > 2.0 * before))
      throw BlowUp("evolve_nonlinear: norm doubled within one step at t = " + std::to_string(t));
    f = std::move(next);
    t += dt;
    ++tr.steps;
    if (tr.steps % cfg.monitor_every == 0 || s + 1 == steps) monitor(t, f);
  }
  tr.final_state = DistributionField(grid, f);
  return tr;
}

}  // namespace grazing
