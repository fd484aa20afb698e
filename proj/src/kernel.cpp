#include "grazing/kernel.hpp"

#include <cmath>
#include <numbers>

#include "grazing/quadrature.hpp"

namespace grazing {

namespace {

constexpr double kPi = std::numbers::pi;
// Relative tolerance applied at the support edges of b^eps so that angles
// constructed to sit exactly on the cutoff are not lost to rounding.
constexpr double kEdgeTol = 1e-12;

void require_closed_form_range(const KernelParams& p) {
  p.validate();
  if (p.epsilon > 0.25) throw DomainError("closed form requires epsilon <= 1/4");
  if (!p.symmetrized) throw DomainError("closed form requires the symmetrized kernel");
}

// \int_{theta(t_lo)}^{theta(t_hi)} F(theta) dtheta written in s = ln t, with
// sin(theta) dtheta = 4 t^2 ds.  g receives (theta, t).
double integrate_log_t(const std::function<double(double, double)>& g, double t_lo,
                       double t_hi, std::vector<double> breaks_t = {}) {
  if (!(t_hi > t_lo)) return 0.0;
  auto f = [&](double s) {
    const double t = std::exp(s);
    const double theta = 2.0 * std::asin(std::min(t, 1.0));
    return g(theta, t) * 4.0 * t * t;
  };
  std::vector<double> pts{std::log(t_lo), std::log(t_hi)};
  for (double b : breaks_t)
    if (b > t_lo && b < t_hi) pts.push_back(std::log(b));
  return integrate_pieces(f, pts, 1e-14);
}

}  // namespace

void KernelParams::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(gamma >= -3.0 && gamma <= 0.0)) throw DomainError("gamma must lie in [-3, 0]");
  if (!(eta >= 0.0)) throw DomainError("eta must be nonnegative");
  if (!(k_const > 0.0)) throw DomainError("K must be positive");
}

double KernelParams::log_eps() const { return -std::log(epsilon); }

double KernelParams::t_max() const { return symmetrized ? kSqrtHalf : 1.0; }

double angular_b_t(const KernelParams& p, double t) {
  if (t < p.epsilon * (1.0 - kEdgeTol)) return 0.0;
  if (t > p.t_max() * (1.0 + kEdgeTol)) return 0.0;
  const double t2 = t * t;
  return 1.0 / (p.log_eps() * t2 * t2);
}

double angular_b(const KernelParams& p, double theta) {
  return angular_b_t(p, std::sin(0.5 * theta));
}

double kinetic_kernel(const KernelParams& p, const Vec3& u, const Vec3& sigma) {
  const double r = u.norm();
  if (r == 0.0) {
    if (p.eta > 0.0) return 0.0;
    if (p.gamma < 0.0) throw SingularityError("kinetic_kernel: u = 0 with eta = 0 and gamma < 0");
    return 0.0;
  }
  if (r < p.eta) return 0.0;
  const double c = std::clamp(u.dot(sigma) / r, -1.0, 1.0);
  // t = sin(theta/2) = sqrt((1 - cos)/2)
  const double t = std::sqrt(0.5 * (1.0 - c));
  return std::pow(r, p.gamma) * angular_b_t(p, t);
}

std::pair<Vec3, Vec3> post_collision(const Vec3& v, const Vec3& v_star, const Vec3& sigma) {
  const Vec3 center = 0.5 * (v + v_star);
  const Vec3 half = 0.5 * (v - v_star).norm() * sigma;
  return {center + half, center - half};
}

double angular_moment(const KernelParams& p, int k) {
  require_closed_form_range(p);
  const double lg = p.log_eps(), e = p.epsilon;
  switch (k) {
    case 0: return 4.0 * kPi / lg * (1.0 / (e * e) - 2.0);
    case 1: return 8.0 * kPi / lg * (1.0 / e - std::sqrt(2.0));
    case 2: return 8.0 * kPi / lg * (lg - 0.5 * std::log(2.0));
    default: throw DomainError("angular_moment: k must be 0, 1 or 2");
  }
}

double angular_moment_quadrature(const KernelParams& p, int k) {
  require_closed_form_range(p);
  if (k < 0 || k > 2) throw DomainError("angular_moment: k must be 0, 1 or 2");
  auto g = [&](double theta, double t) { return angular_b(p, theta) * std::pow(t, k); };
  return 2.0 * kPi * integrate_log_t(g, p.epsilon, p.t_max());
}

double lambda1(const KernelParams& p) {
  require_closed_form_range(p);
  const double lg = p.log_eps();
  return 8.0 / lg * (lg - 0.5 * std::log(2.0));
}

double lambda1_quadrature(const KernelParams& p) {
  require_closed_form_range(p);
  // 1 - cos(theta) = 2 t^2, without the cancellation at small angles
  auto g = [&](double theta, double t) { return angular_b(p, theta) * 2.0 * t * t; };
  return integrate_log_t(g, p.epsilon, p.t_max());
}

double BumpPartition::phi(double r) const {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 4.0 / 3.0) return 0.0;
  // smooth step from E(x) = exp(-1/x)
  const double s = 3.0 * (r - 1.0);
  const double a = std::exp(-1.0 / (1.0 - s));
  const double b = std::exp(-1.0 / s);
  return a / (a + b);
}

double BumpPartition::psi(double r) const { return phi(0.5 * r) - phi(r); }

double BumpPartition::localizer(int j, double r) const {
  if (j < 0) return phi(r);
  return psi(std::ldexp(r, -j));
}

CharacteristicWeight::CharacteristicWeight(const KernelParams& p, BumpPartition bump)
    : p_(p), bump_(bump) {
  p_.validate();
  lg_ = p_.log_eps();
  ceiling_ = 1.0 / (std::sqrt(lg_) * p_.epsilon);
}

double CharacteristicWeight::operator()(double r) const {
  r = std::abs(r);
  const double bracket = std::sqrt(1.0 + r * r);
  const double phi_r = bump_.phi(r);
  const double phi_er = bump_.phi(p_.epsilon * r);
  double w = bracket * phi_r;
  const double mid = phi_er - phi_r;
  if (mid != 0.0) w += bracket * std::sqrt(1.0 - std::log(r) / lg_ + 1.0 / lg_) * mid;
  w += ceiling_ * (1.0 - phi_er);
  return w;
}

double characteristic_weight(const CharacteristicWeight& w, double r) { return w(r); }
double characteristic_weight(const CharacteristicWeight& w, const Vec3& y) { return w(y); }

double polynomial_weight(double l, double r) { return std::pow(1.0 + r * r, 0.5 * l); }
double polynomial_weight(double l, const Vec3& v) { return polynomial_weight(l, v.norm()); }

double cancellation_J(const KernelParams& p, double r) {
  r = std::abs(r);
  if (r > 1.0 || r == 0.0) return 0.0;
  return cancellation_J_tau(p, std::sqrt((1.0 - r) * (1.0 + r)));
}

double cancellation_J_tau(const KernelParams& p, double tau) {
  if (!(tau >= 0.0) || tau >= kSqrtHalf || tau > 1.0) return 0.0;
  const double r = std::sqrt((1.0 - tau) * (1.0 + tau));
  auto g = [&](double theta, double) { return angular_b(p, theta); };
  const double inner = integrate_log_t(g, std::max(tau, 1e-300), kSqrtHalf, {p.epsilon});
  return 2.0 * kPi / (r * r * r) * inner;
}

double cancellation_kernel(const KernelParams& p, const Vec3& z, double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  return cancellation_J(p, z.norm() / delta) / (delta * delta * delta);
}

double cancellation_J_l1(const KernelParams& p) {
  p.validate();
  auto g = [&](double theta, double t) {
    return angular_b(p, theta) * 0.5 * std::log1p(-t * t);
  };
  return -8.0 * kPi * kPi * integrate_log_t(g, p.epsilon, kSqrtHalf);
}

double cancellation_J_l1_radial(const KernelParams& p) {
  p.validate();
  // r^2 dr = -r tau dtau with tau = sqrt(1 - r^2); ln tau above eps, where J ~ tau^{-2}
  auto r_of = [](double tau) { return std::sqrt((1.0 - tau) * (1.0 + tau)); };
  auto flat = [&](double tau) { return 4.0 * kPi * r_of(tau) * tau * cancellation_J_tau(p, tau); };
  auto logs = [&](double s) {
    const double tau = std::exp(s);
    return 4.0 * kPi * r_of(tau) * tau * tau * cancellation_J_tau(p, tau);
  };
  const double lo = std::min(p.epsilon, kSqrtHalf);
  return integrate(flat, 0.0, lo, 1e-12) + integrate(logs, std::log(lo), std::log(kSqrtHalf), 1e-12);
}

Mat3 landau_matrix(const Vec3& z, double k_const, double gamma) {
  const double r = z.norm();
  if (r == 0.0) throw SingularityError("landau_matrix: z = 0");
  const Vec3 zh = z / r;
  return 2.0 * kPi * k_const * std::pow(r, gamma + 2.0) *
         (Mat3::Identity() - zh * zh.transpose());
}

double symbol_A(const KernelParams& p, double xi_norm) {
  p.validate();
  if (xi_norm == 0.0) return 0.0;
  const double x2 = xi_norm * xi_norm;
  auto g = [&](double theta, double t) {
    return angular_b(p, theta) * std::min(x2 * t * t, 1.0);
  };
  return 2.0 * kPi * integrate_log_t(g, p.epsilon, p.t_max(), {1.0 / xi_norm});
}

}  // namespace grazing
