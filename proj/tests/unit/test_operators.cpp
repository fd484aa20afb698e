#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "grazing/operators.hpp"
#include "unit/oracles.hpp"

using namespace grazing;

namespace {

constexpr double kPi = std::numbers::pi;

KernelParams eps(double e) {
  KernelParams p;
  p.epsilon = e;
  return p;
}

double max_rel(const Vector& a, const Vector& ref) {
  return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
}

DistributionField density_g(const VelocityGrid& g) {
  return sample(g, [](const Vec3& v) {
    return maxwellian_value(v) * (1.0 + 0.3 * v[0] - 0.2 * v[1] * v[2] + 0.05 * v.squaredNorm());
  });
}

DistributionField density_h(const VelocityGrid& g) {
  return sample(g, [](const Vec3& v) {
    const Vec3 c(0.4, -0.3, 0.2);
    return std::exp(-0.6 * (v - c).squaredNorm()) * (1.0 + 0.2 * v[2]);
  });
}

DistributionField smooth_perturbation(const VelocityGrid& g, double a, double b) {
  return sample(g, [=](const Vec3& v) {
    return std::sqrt(maxwellian_value(v)) * (a + b * v[0] * v[1] - 0.3 * v[2] + 0.1 * v[0] * v[0]);
  });
}

std::array<double, 5> invariants(const DistributionField& q) {
  std::array<double, 5> out{};
  for (int k = 0; k < q.grid.size(); ++k) {
    const Vec3 v = q.grid.node(k);
    const double w = q[k] * q.grid.weight();
    out[0] += w;
    out[1] += w * v[0];
    out[2] += w * v[1];
    out[3] += w * v[2];
    out[4] += w * v.squaredNorm();
  }
  return out;
}

double abs_scale(const DistributionField& q) {
  double s = 0;
  for (int k = 0; k < q.grid.size(); ++k) s += std::abs(q[k]) * (1 + q.grid.node(k).squaredNorm()) * q.grid.weight();
  return s;
}

}  // namespace

TEST_CASE("collision frame") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  std::vector<Vec3> dirs = {Vec3(1, 0, 0), Vec3(0, 0, 1), Vec3(1, 1, 0).normalized(), Vec3(1, 1, 1).normalized()};
  for (int k = 0; k < 50; ++k) dirs.push_back(Vec3(N(rng), N(rng), N(rng)).normalized());
  for (const Vec3& u : dirs) {
    Vec3 e1, e2, f1, f2;
    collision_frame(u, e1, e2);
    oracle::frame(u, f1, f2);
    CHECK((e1 - f1).norm() < 1e-15);
    CHECK((e2 - f2).norm() < 1e-15);
    CHECK(std::abs(e1.dot(u)) < 1e-15);
    CHECK(std::abs(e2.dot(u)) < 1e-15);
    CHECK(std::abs(e1.dot(e2)) < 1e-15);
    CHECK(std::abs(e1.norm() - 1) < 1e-15);
    Vec3 m1, m2;
    collision_frame(-u, m1, m2);
    CHECK((m1 + e1).norm() < 1e-15);
    CHECK((m2 - e2).norm() < 1e-15);
  }
}

TEST_CASE("band rule") {
  AngularRule r;
  r.n_t = 16;
  r.n_phi = 6;
  for (double e : {1e-2, 0.3}) {
    const KernelParams p = eps(e);
    const BandRule b = band_rule(p, r);
    CHECK(b.size() == 96);
    double total = 0;
    for (double w : b.weight) total += w;
    // 2 pi \int b 4 t dt = 4 pi |ln eps|^{-1} (t0^{-2} - t_max^{-2})
    const double t0 = std::max(e, r.split);
    const double exact = 4 * kPi / -std::log(e) * (1 / (t0 * t0) - 2.0);
    CHECK(std::abs(total - exact) < 1e-10 * exact);
    for (int k = 0; k < b.size(); ++k) {
      CHECK(b.cos_theta[k] >= 0.0);
      CHECK(b.cos_theta[k] <= 1 - 2 * t0 * t0 + 1e-12);
      CHECK(std::abs(b.cos_theta[k] * b.cos_theta[k] + b.sin_theta[k] * b.sin_theta[k] - 1) < 1e-14);
    }
  }
  CHECK(grazing_coefficient(eps(1e-2), r) == doctest::Approx(std::log(25.0) / std::log(100.0)).epsilon(1e-14));
  CHECK(grazing_coefficient(eps(0.3), r) == 0.0);
  AngularRule bad;
  bad.n_phi = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = {};
  bad.split = 0.9;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("brute-force equivalence at n=8") {
  const VelocityGrid g(6.0, 8);
  const DistributionField G = density_g(g), H = density_h(g);
  AngularRule r;
  r.n_t = 2;
  r.n_phi = 4;
  SUBCASE("boltzmann with grazing part") {
    const KernelParams p = eps(1e-2);
    const Vector ref = oracle::boltzmann(p, r, g, G.values, H.values);
    CHECK(max_rel(collision_bilinear(p, G, H, r).values, ref) < 1e-12);
  }
  SUBCASE("boltzmann, band only, truncated, gamma=-2") {
    KernelParams p = eps(0.3);
    p.gamma = -2.0;
    p.eta = 1.0;
    const Vector ref = oracle::boltzmann(p, r, g, G.values, H.values);
    CHECK(max_rel(collision_bilinear(p, G, H, r).values, ref) < 1e-12);
  }
  SUBCASE("landau") {
    for (auto [K, gam, eta] : {std::tuple{1.0, -3.0, 0.0}, std::tuple{2.5, -2.0, 0.8}}) {
      const Vector ref = oracle::landau(g, G.values, H.values, K, gam, eta);
      CHECK(max_rel(landau_bilinear(G, H, K, gam, eta).values, ref) < 1e-12);
    }
  }
  SUBCASE("threads do not change the result") {
    CollisionModel m = CollisionModel::boltzmann(eps(1e-2), r);
    const Vector one = collision_apply(m, G, H).values;
    m.threads = 3;
    CHECK(collision_apply(m, G, H).values == one);
  }
}

TEST_CASE("maxwellian equilibrium and conservation") {
  const VelocityGrid g(6.0, 12);
  const DistributionField mu = maxwellian(g);
  const DistributionField G = density_g(g);
  for (const CollisionModel& m : {CollisionModel::boltzmann(eps(1e-2)), CollisionModel::landau(eps(1e-2))}) {
    const DistributionField q0 = collision_apply(m, mu, mu);
    CHECK(weighted_l2_norm(q0, 0) < 1e-12);
    const DistributionField q = collision_apply(m, G, G);
    const auto inv = invariants(q);
    const double scale = abs_scale(q);
    for (double x : inv) CHECK(std::abs(x) < 1e-12 * scale);
    CHECK(weighted_l2_norm(q, 0) > 1e-6);
  }
}

TEST_CASE("gamma bilinear") {
  const VelocityGrid g(6.0, 8);
  const CollisionModel m = CollisionModel::boltzmann(eps(1e-2));
  const DistributionField smu = sample(g, [](const Vec3& v) { return std::sqrt(maxwellian_value(v)); });
  CHECK(weighted_l2_norm(gamma_bilinear(m, smu, smu), 0) < 1e-12);
  const DistributionField f1 = smooth_perturbation(g, 0.2, 1.0), f2 = smooth_perturbation(g, -1.0, 0.4);
  const DistributionField f3 = smooth_perturbation(g, 0.5, -0.7);
  CHECK(gamma_bilinear(m, DistributionField(g), f1).values.cwiseAbs().maxCoeff() == 0.0);
  const double a = 0.7, b = -1.3;
  const DistributionField comb(g, a * f2.values + b * f3.values);
  const Vector lhs = gamma_bilinear(m, f1, comb).values;
  const Vector rhs = a * gamma_bilinear(m, f1, f2).values + b * gamma_bilinear(m, f1, f3).values;
  CHECK(max_rel(lhs, rhs) < 1e-10);
}

TEST_CASE("linearized operator") {
  const VelocityGrid g(6.0, 8);
  for (const CollisionModel& m : {CollisionModel::boltzmann(eps(1e-3)), CollisionModel::landau(eps(1e-3))}) {
    const DistributionField f = smooth_perturbation(g, 0.3, 1.0);
    const DistributionField lf = linearized_apply(m, f);
    const double scale = weighted_l2_norm(lf, 0) / weighted_l2_norm(f, 0);
    CHECK(scale > 0.0);
    for (auto chi : {std::function<double(const Vec3&)>([](const Vec3&) { return 1.0; }),
                     std::function<double(const Vec3&)>([](const Vec3& v) { return v[0]; }),
                     std::function<double(const Vec3&)>([](const Vec3& v) { return v[2]; }),
                     std::function<double(const Vec3&)>([](const Vec3& v) { return v.squaredNorm(); })}) {
      const DistributionField e = sample(g, [&](const Vec3& v) { return chi(v) * std::sqrt(maxwellian_value(v)); });
      CHECK(weighted_l2_norm(linearized_apply(m, e), 0) < 1e-6 * scale * weighted_l2_norm(e, 0));
    }
    std::mt19937_64 rng(4);
    std::normal_distribution<double> N;
    for (int trial = 0; trial < 3; ++trial) {
      DistributionField r(g);
      for (int k = 0; k < g.size(); ++k) r[k] = N(rng) * std::pow(maxwellian_value(g.node(k)), 0.25);
      const double q = inner(linearized_apply(m, r), r);
      CHECK(q >= -1e-8 * inner(r, r));
    }
  }
}

TEST_CASE("remainder identity") {
  const VelocityGrid g(6.0, 8);
  const CollisionModel m = CollisionModel::boltzmann(eps(1e-2));
  const DistributionField f1 = smooth_perturbation(g, 0.2, 1.0), f2 = smooth_perturbation(g, -1.0, 0.4);
  const DistributionField smu = sample(g, [](const Vec3& v) { return std::sqrt(maxwellian_value(v)); });
  const DistributionField sg(g, smu.values.cwiseProduct(f1.values));
  const Vector expect = gamma_bilinear(m, f1, f2).values - collision_apply(m, sg, f2).values;
  CHECK(max_rel(remainder_I(m, f1, f2).values, expect) < 1e-12);
  CHECK(remainder_I(m, DistributionField(g), f2).values.cwiseAbs().maxCoeff() == 0.0);
  KernelParams far = eps(1e-2);
  far.eta = 100.0;
  CHECK(remainder_I(CollisionModel::boltzmann(far), f1, f2).values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dissipation functional") {
  const VelocityGrid g(6.0, 8);
  const DistributionField f1 = smooth_perturbation(g, 0.2, 1.0), f2 = smooth_perturbation(g, -1.0, 0.4);
  DistributionField c(g);
  c.values.setConstant(2.0);
  for (const CollisionModel& m : {CollisionModel::boltzmann(eps(1e-2)), CollisionModel::landau(eps(1e-2))}) {
    CHECK(std::abs(dissipation_functional(m, f1, c)) < 1e-14);
    CHECK(dissipation_functional(m, f1, f2) > 0.0);
    DistributionField twice(g, 2.0 * f2.values);
    CHECK(dissipation_functional(m, f1, twice) == doctest::Approx(4 * dissipation_functional(m, f1, f2)));
  }
}

TEST_CASE("weak form modes") {
  // gamma = 0 and eps above the split: the band rule alone, so grid and direct
  // differ only by the interpolation of G, H at post-collision points
  KernelParams p = eps(0.3);
  p.gamma = 0.0;
  auto chi = [](const Vec3& v) { return v[0] * v[1] + 0.3 * v[2] * v[2] - 0.5 * v[0]; };
  WeakFormSpec spec;
  spec.params = p;
  spec.rule.n_t = spec.direct_n_t = 4;
  spec.rule.n_phi = spec.direct_n_phi = 8;
  SUBCASE("grid field against direct quadrature") {
    const VelocityGrid g(5.0, 14);
    const DistributionField G = density_g(g), H = density_h(g);
    const double grid = weak_form(spec, G, H, chi);
    spec.mode = WeakMode::direct;
    const double direct = weak_form(spec, G, H, chi);
    CHECK(std::abs(grid - direct) < 1e-3 * std::abs(direct));
  }
  SUBCASE("monte carlo and mass") {
    const VelocityGrid g(6.0, 8);
    const DistributionField G = density_g(g), H = density_h(g);
    spec.mode = WeakMode::direct;
    const double direct = weak_form(spec, G, H, chi);
    CHECK(weak_form(spec, G, H, [](const Vec3&) { return 1.0; }) == 0.0);
    spec.mode = WeakMode::monte_carlo;
    spec.samples = 1000000;
    const double mc = weak_form(spec, G, H, chi);
    CHECK(std::abs(mc - direct) < 0.05 * std::abs(direct));
    spec.seed = 7;
    CHECK(weak_form(spec, G, H, chi) != mc);
  }
}

TEST_CASE("operator difference") {
  const VelocityGrid g(6.0, 8);
  const DistributionField smu = sample(g, [](const Vec3& v) { return std::sqrt(maxwellian_value(v)); });
  const DistributionField f1 = smooth_perturbation(g, 0.2, 1.0), f2 = smooth_perturbation(g, -1.0, 0.4);
  CHECK(std::abs(operator_difference(eps(1e-2), smu, smu, f1, 0)) < 1e-12);
  const double a = operator_difference(eps(1e-2), f1, f2, f1, 0);
  const double b = operator_difference(eps(1e-2), f1, f2, f2, 0);
  const DistributionField s(g, 2 * f1.values - f2.values);
  CHECK(operator_difference(eps(1e-2), f1, f2, s, 0) == doctest::Approx(2 * a - b).epsilon(1e-10));
  // the difference is carried by the band, which scales as |ln eps|^{-1}
  const double d4 = operator_difference(eps(1e-4), f1, f2, f1, 0);
  const double d8 = operator_difference(eps(1e-8), f1, f2, f1, 0);
  CHECK(d4 / d8 == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("cancellation identity") {
  const VelocityGrid g(6.0, 8);
  auto gf = [](const Vec3& v) { return std::exp(-0.5 * (v - Vec3(0.3, -0.2, 0.1)).squaredNorm()); };
  auto hf = [](const Vec3& v) { return std::exp(-0.25 * v.squaredNorm()) * (1 + 0.5 * v[0]); };
  const CancellationResult r = cancellation_identity(eps(1e-2), gf, hf, g, 0.5);
  CHECK(r.rel_error() < 1e-3);
  const CancellationResult z = cancellation_identity(eps(1e-2), [](const Vec3&) { return 0.0; }, hf, g, 0.5);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);
}
