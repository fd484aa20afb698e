#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "grazing/kernel.hpp"
#include "unit/oracles.hpp"

using namespace grazing;

namespace {

constexpr double kPi = std::numbers::pi;

KernelParams eps(double e) {
  KernelParams p;
  p.epsilon = e;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// \int_{S^2} b t^k dsigma with dsigma = 2 pi 4 t dt, by adaptive Simpson in ln t.
double moment_oracle(double e, int k) {
  const double lg = -std::log(e);
  auto f = [&](double s) {
    const double t = std::exp(s);
    return 2.0 * kPi * 4.0 * t * t * std::pow(t, k) / (lg * std::pow(t, 4));
  };
  return oracle::simpson(f, std::log(e), std::log(std::sqrt(0.5)), 1e-14);
}

}  // namespace

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(eps(0.0).validate(), DomainError);
  CHECK_THROWS_AS(eps(1.0).validate(), DomainError);
  KernelParams p;
  p.gamma = 0.5;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.eta = -1;
  CHECK_THROWS_AS(p.validate(), DomainError);
  p = {};
  p.k_const = 0;
  CHECK_THROWS_AS(p.validate(), DomainError);
  CHECK_NOTHROW(eps(0.5).validate());
}

TEST_CASE("angular_b support and values") {
  CHECK(angular_b(eps(0.1), 2.0 * std::asin(0.05)) == 0.0);
  CHECK(angular_b(eps(0.1), kPi / 2) == doctest::Approx(4.0 / std::log(10.0)).epsilon(1e-13));
  CHECK(angular_b(eps(0.1), 3 * kPi / 4) == 0.0);
  KernelParams open = eps(0.1);
  open.symmetrized = false;
  CHECK(angular_b(open, 3 * kPi / 4) > 0.0);
  // exactly at the cutoff
  CHECK(angular_b_t(eps(0.1), 0.1) == doctest::Approx(1.0 / (std::log(10.0) * 1e-4)).epsilon(1e-13));
}

TEST_CASE("kinetic_kernel examples") {
  KernelParams p = eps(0.1);
  p.eta = 0.5;
  CHECK(kinetic_kernel(p, Vec3(0.3, 0, 0), Vec3(0, 1, 0)) == 0.0);

  p = eps(0.01);
  p.gamma = 0.0;
  const double t = 0.01, c = 1 - 2 * t * t, s = std::sqrt(1 - c * c);
  const double v = kinetic_kernel(p, Vec3(7, 0, 0), Vec3(c, s, 0));
  CHECK(rel(v, 1.0 / (-std::log(0.01) * std::pow(0.01, 4))) < 1e-9);

  p = eps(0.1);
  p.gamma = -3.0;
  const double expect = 0.125 * 4.0 / std::log(10.0);
  CHECK(rel(kinetic_kernel(p, Vec3(2, 0, 0), Vec3(0, 1, 0)), expect) < 1e-13);
}

TEST_CASE("post_collision") {
  const Vec3 v(1, 2, -0.5), vs(-0.3, 0.4, 2);
  const Vec3 u = (v - vs).normalized();
  auto [a, b] = post_collision(v, vs, u);
  CHECK((a - v).norm() < 1e-14);
  CHECK((b - vs).norm() < 1e-14);
  std::tie(a, b) = post_collision(v, vs, -u);
  CHECK((a - vs).norm() < 1e-14);
  CHECK((b - v).norm() < 1e-14);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int k = 0; k < 100; ++k) {
    const Vec3 x(N(rng), N(rng), N(rng)), y(N(rng), N(rng), N(rng));
    const Vec3 s = Vec3(N(rng), N(rng), N(rng)).normalized();
    const auto [xp, yp] = post_collision(x, y, s);
    const double e0 = x.squaredNorm() + y.squaredNorm();
    CHECK(std::abs(xp.squaredNorm() + yp.squaredNorm() - e0) <= 1e-12 * e0);
    CHECK((xp + yp - x - y).norm() < 1e-13);
  }
}

TEST_CASE("angular moments closed form") {
  const double l10 = std::log(10.0);
  CHECK(rel(angular_moment(eps(0.1), 0), 4 * kPi * 98 / l10) < 1e-14);
  CHECK(angular_moment(eps(0.1), 0) == doctest::Approx(534.84).epsilon(1e-4));
  CHECK(angular_moment(eps(0.1), 1) == doctest::Approx(93.71).epsilon(1e-3));
  CHECK(angular_moment(eps(0.1), 2) == doctest::Approx(21.35).epsilon(1e-3));
  for (double e : {0.25, 0.1, 1e-2, 1e-4, 1e-6, 1e-8}) {
    const double m2 = angular_moment(eps(e), 2);
    CHECK(m2 >= 4 * kPi);
    CHECK(m2 <= 8 * kPi);
    for (int k = 0; k < 3; ++k) {
      CHECK(rel(angular_moment(eps(e), k), moment_oracle(e, k)) < 1e-10);
      CHECK(rel(angular_moment_quadrature(eps(e), k), angular_moment(eps(e), k)) < 1e-10);
    }
  }
  CHECK_THROWS_AS(angular_moment(eps(0.3), 0), DomainError);
  CHECK_THROWS_AS(angular_moment(eps(0.1), 3), DomainError);
}

TEST_CASE("lambda1") {
  CHECK(lambda1(eps(0.1)) == doctest::Approx(6.7959).epsilon(1e-4));
  CHECK(lambda1(eps(1e-6)) == doctest::Approx(7.799).epsilon(1e-3));
  double prev = 0.0;
  for (double e : {0.25, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-8}) {
    const double l = lambda1(eps(e));
    CHECK(l > prev);
    CHECK(l < 8.0);
    prev = l;
    // \int_0^pi b (1 - cos theta) sin theta d theta with 1 - cos theta = 2 t^2
    CHECK(rel(lambda1(eps(e)), moment_oracle(e, 2) / kPi) < 1e-10);
    CHECK(rel(lambda1_quadrature(eps(e)), lambda1(eps(e))) < 1e-10);
  }
  CHECK_THROWS_AS(lambda1(eps(0.3)), DomainError);
}

TEST_CASE("bump partition") {
  BumpPartition b;
  for (double r = 0.0; r < 300.0; r += 0.0137) {
    CHECK(b.phi(r) >= 0.0);
    CHECK(b.phi(r) <= 1.0);
    CHECK(b.psi(r) >= 0.0);
    CHECK(b.psi(r) <= 1.0);
    double sum = b.localizer(-1, r);
    for (int j = 0; j < 20; ++j) sum += b.localizer(j, r);
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  CHECK(b.phi(1.0) == 1.0);
  CHECK(b.phi(4.0 / 3.0) == 0.0);
}

TEST_CASE("characteristic weight") {
  for (double e : {0.25, 0.1, 1e-2, 1e-3, 1e-6}) {
    const CharacteristicWeight W(eps(e));
    const double lg = -std::log(e);
    const double ceiling = 1.0 / (std::sqrt(lg) * e);
    CHECK(rel(W.ceiling(), ceiling) < 1e-14);
    CHECK(W(0.0) == 1.0);
    CHECK(rel(W(4.0 / (3.0 * e)), ceiling) < 1e-14);
    CHECK(rel(W(10.0 / e), ceiling) < 1e-14);
    // Upper bound with slack: sqrt(1 + 1/|ln eps|) from the middle term at |y| = 1, and
    // max_s phi(s) (s sqrt(1 - ln s) - 1) + 1 < 1.05 over the layer s = eps |y| in [1, 4/3].
    const double slack = std::max(std::sqrt(1.0 + 1.0 / lg), 1.05);
    // Lower bound holds with constant sqrt(1 - ln(4/3)) in the transition layer.
    const double low = std::sqrt(1.0 - std::log(4.0 / 3.0));
    BumpPartition bump;
    for (double s = -3; s < 10; s += 0.001) {
      const double r = std::pow(10.0, s);
      const double br = std::sqrt(1 + r * r);
      const double w = W(r);
      CHECK(w > 0.0);
      CHECK(w <= slack * std::min(br, ceiling));
      CHECK(w >= low * bump.phi(e * r) * br / std::sqrt(lg));
    }
    CHECK(W(Vec3(3, 4, 0)) == W(5.0));
  }
  const CharacteristicWeight W(eps(1e-3));
  const double v = characteristic_weight(W, 10.0);
  CHECK(v > 0.0);
  CHECK(v <= std::sqrt(1 + 1 / -std::log(1e-3)) * std::min(std::sqrt(101.0), W.ceiling()));
  BumpPartition bump;
  double layer = 0.0;
  for (double s = 1.0; s <= 4.0 / 3.0; s += 1e-5)
    layer = std::max(layer, bump.phi(s) * (s * std::sqrt(1 - std::log(s)) - 1) + 1);
  CHECK(layer < 1.05);
  CHECK(layer > 1.04);
}

TEST_CASE("characteristic weight is submultiplicative up to a constant") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double e : {0.25, 1e-2, 1e-4}) {
    const CharacteristicWeight W(eps(e));
    std::uniform_real_distribution<double> logr(std::log(0.01), std::log(8.0 / e));
    auto draw = [&] {
      Vec3 d(u(rng), u(rng), u(rng));
      while (d.norm() < 1e-3) d = Vec3(u(rng), u(rng), u(rng));
      return Vec3(std::exp(logr(rng)) * d.normalized());
    };
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const Vec3 x = draw(), y = draw();
      worst = std::max(worst, W(x - y) / (W(x) * W(y)));
    }
    CHECK(worst > 0.0);
    CHECK(worst <= 2.0);
  }
}

TEST_CASE("polynomial weight") {
  CHECK(polynomial_weight(0, Vec3(1, 2, 3)) == 1.0);
  CHECK(polynomial_weight(2, Vec3(1, 0, 0)) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rel(polynomial_weight(-3, 2.0), std::pow(5.0, -1.5)) < 1e-15);
}

TEST_CASE("cancellation kernel") {
  const KernelParams p = eps(0.1);
  CHECK(cancellation_kernel(p, Vec3(1.5, 0, 0), 1.0) == 0.0);
  CHECK(cancellation_kernel(p, Vec3(0.75, 0, 0), 0.5) == 0.0);
  CHECK_THROWS_AS(cancellation_kernel(p, Vec3(0.1, 0, 0), 0.0), DomainError);
  CHECK_THROWS_AS(cancellation_kernel(p, Vec3(0.1, 0, 0), 1.5), DomainError);
  // the angular interval [2 acos|z|, pi/2] closes at |z| = 1/sqrt 2 and is full at |z| = 1
  CHECK(cancellation_J(p, 0.5) == 0.0);
  CHECK(cancellation_J(p, std::sqrt(0.5) * (1 + 1e-12)) < 1e-6 * cancellation_J(p, 0.9));
  CHECK(rel(cancellation_J(p, 1.0 - 1e-13), angular_moment(p, 0)) < 1e-5);
  const double z = 0.8;
  CHECK(rel(cancellation_kernel(p, Vec3(0, z * 0.5, 0), 0.5), 8.0 * cancellation_J(p, z)) < 1e-14);

  // direct theta-integral of the definition
  const double lo = 2.0 * std::acos(z);
  auto f = [&](double th) { return angular_b(p, th) * std::sin(th); };
  const double direct = 2 * kPi / (z * z * z) * oracle::simpson(f, lo, kPi / 2, 1e-12);
  CHECK(rel(cancellation_J(p, z), direct) < 1e-8);
}

TEST_CASE("cancellation kernel L1 norm") {
  for (double e : {1e-1, 1e-2, 1e-4, 1e-8}) {
    const KernelParams p = eps(e);
    const double l1 = cancellation_J_l1(p);
    CHECK(rel(cancellation_J_l1_radial(p), l1) < 1e-6);
    CHECK(l1 < 16 * kPi * kPi);
  }
  const KernelParams p = eps(0.1);
  auto f = [&](double th) { return angular_b(p, th) * std::log(std::cos(th / 2)) * std::sin(th); };
  const double direct = -8 * kPi * kPi * oracle::simpson(f, 2 * std::asin(0.1), kPi / 2, 1e-12);
  CHECK(rel(cancellation_J_l1(p), direct) < 1e-8);
  CHECK(cancellation_J_l1(eps(1e-8)) == doctest::Approx(156.26).epsilon(1e-3));
}

TEST_CASE("landau matrix") {
  const Mat3 a = landau_matrix(Vec3(1, 0, 0), 1.0);
  Mat3 e = Mat3::Zero();
  e(1, 1) = e(2, 2) = 2 * kPi;
  CHECK((a - e).norm() < 1e-14);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  for (int k = 0; k < 20; ++k) {
    const Vec3 z(N(rng), N(rng), N(rng));
    const Mat3 m = landau_matrix(z, 2.5);
    CHECK((m * z).norm() < 1e-13 * m.norm() * z.norm());
    CHECK(rel(m.trace(), 4 * kPi * 2.5 / z.norm()) < 1e-13);
    CHECK((m - m.transpose()).norm() == 0.0);
  }
  CHECK_THROWS_AS(landau_matrix(Vec3::Zero(), 1.0), SingularityError);
}

TEST_CASE("symbol A") {
  for (double e : {0.1, 1e-2, 1e-4}) {
    const KernelParams p = eps(e);
    CHECK(symbol_A(p, 0.0) == 0.0);
    for (double x : {0.1, 0.3, 0.5}) CHECK(rel(symbol_A(p, x), x * x * angular_moment(p, 2)) < 1e-10);
    const double big = symbol_A(p, 2.0 / e);
    CHECK(big <= angular_moment(p, 0));
    CHECK(big >= 0.5 * angular_moment(p, 0));
    CHECK(symbol_A(p, 1.0) < symbol_A(p, 3.0));
  }
}
