#include "grazing/sphere.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "grazing/quadrature.hpp"

namespace grazing {

namespace {

constexpr double kPi = std::numbers::pi;

SphereQuadrature product_rule(int degree) {
  if (degree < 1) throw std::invalid_argument("sphere quadrature: degree must be >= 1");
  SphereQuadrature q;
  q.degree = degree;
  const int nt = (degree + 2) / 2;
  const int np = degree + 1;
  const GaussRule gl = gauss_legendre(nt);
  for (int i = 0; i < nt; ++i) {
    const double z = gl.x[i];
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    for (int j = 0; j < np; ++j) {
      const double ph = 2.0 * kPi * (j + 0.5) / np;
      q.nodes.emplace_back(s * std::cos(ph), s * std::sin(ph), z);
      q.weights.push_back(gl.w[i] * 2.0 * kPi / np);
    }
  }
  return q;
}

// Orbit generators of the octahedral group.
void add_a1(SphereQuadrature& q, double w) {
  for (int a = 0; a < 3; ++a)
    for (int s : {-1, 1}) {
      Vec3 v = Vec3::Zero();
      v[a] = s;
      q.nodes.push_back(v);
      q.weights.push_back(w);
    }
}
void add_a2(SphereQuadrature& q, double w) {
  const double c = std::sqrt(0.5);
  for (int a = 0; a < 3; ++a)
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        Vec3 v = Vec3::Zero();
        v[(a + 1) % 3] = s1 * c;
        v[(a + 2) % 3] = s2 * c;
        q.nodes.push_back(v);
        q.weights.push_back(w);
      }
}
void add_a3(SphereQuadrature& q, double w) {
  const double c = 1.0 / std::sqrt(3.0);
  for (int s1 : {-1, 1})
    for (int s2 : {-1, 1})
      for (int s3 : {-1, 1}) {
        q.nodes.emplace_back(s1 * c, s2 * c, s3 * c);
        q.weights.push_back(w);
      }
}
// (+-l, +-l, +-m) and its three placements of m.
void add_b(SphereQuadrature& q, double l, double w) {
  const double m = std::sqrt(1.0 - 2.0 * l * l);
  for (int a = 0; a < 3; ++a)
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1})
        for (int s3 : {-1, 1}) {
          Vec3 v;
          v[a] = s3 * m;
          v[(a + 1) % 3] = s1 * l;
          v[(a + 2) % 3] = s2 * l;
          q.nodes.push_back(v);
          q.weights.push_back(w);
        }
}
// (+-p, +-q, 0) and all permutations.
void add_c(SphereQuadrature& q, double p, double w) {
  const double r = std::sqrt(1.0 - p * p);
  const int perm[6][3] = {{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}};
  for (auto& pm : perm)
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        Vec3 v = Vec3::Zero();
        v[pm[0]] = s1 * p;
        v[pm[1]] = s2 * r;
        q.nodes.push_back(v);
        q.weights.push_back(w);
      }
}

SphereQuadrature lebedev_rule(int degree) {
  SphereQuadrature q;
  q.degree = degree;
  switch (degree) {
    case 3: add_a1(q, 1.0 / 6.0); break;
    case 5:
      add_a1(q, 1.0 / 15.0);
      add_a3(q, 3.0 / 40.0);
      break;
    case 7:
      add_a1(q, 1.0 / 21.0);
      add_a2(q, 4.0 / 105.0);
      add_a3(q, 9.0 / 280.0);
      break;
    case 9:
      add_a1(q, 1.0 / 105.0);
      add_a3(q, 9.0 / 280.0);
      add_c(q, 0.4597008433809831, 1.0 / 35.0);
      break;
    case 11:
      add_a1(q, 4.0 / 315.0);
      add_a2(q, 64.0 / 2835.0);
      add_a3(q, 27.0 / 1280.0);
      add_b(q, 0.3015113445777636, 14641.0 / 725760.0);
      break;
    default: throw std::invalid_argument("lebedev: supported degrees are 3, 5, 7, 9, 11");
  }
  for (double& w : q.weights) w *= 4.0 * kPi;
  return q;
}

}  // namespace

SphereQuadrature build_sphere_quadrature(int order, SphereBackend backend) {
  return backend == SphereBackend::product ? product_rule(order) : lebedev_rule(order);
}

int sh_index(int l, int m) { return l * l + l + m; }

void real_spherical_harmonics(int l_max, const Vec3& u, double* out) {
  const double x = std::clamp(u[2], -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
  const double phi = std::atan2(u[1], u[0]);
  for (int m = 0; m <= l_max; ++m) {
    // P_m^m, P_{m+1}^m, ... by upward recurrence in l
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i) pmm *= -(2.0 * i - 1.0) * s;
    double p_prev = 0.0, p_cur = pmm;
    for (int l = m; l <= l_max; ++l) {
      if (l == m + 1) {
        p_prev = p_cur;
        p_cur = x * (2.0 * m + 1.0) * pmm;
      } else if (l > m + 1) {
        const double p_next = ((2.0 * l - 1.0) * x * p_cur - (l + m - 1.0) * p_prev) / (l - m);
        p_prev = p_cur;
        p_cur = p_next;
      }
      double ratio = 1.0;  // (l-m)!/(l+m)!
      for (int i = l - m + 1; i <= l + m; ++i) ratio /= i;
      const double norm = std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) * ratio);
      if (m == 0) {
        out[sh_index(l, 0)] = norm * p_cur;
      } else {
        out[sh_index(l, m)] = std::sqrt(2.0) * norm * p_cur * std::cos(m * phi);
        out[sh_index(l, -m)] = std::sqrt(2.0) * norm * p_cur * std::sin(m * phi);
      }
    }
  }
}

SphericalHarmonicPlan::SphericalHarmonicPlan(double L, int n_shells, int l_max, int angular_degree)
    : l_max_(l_max) {
  if (l_max < 0) throw std::invalid_argument("plan: l_max must be >= 0");
  if (n_shells < 1) throw std::invalid_argument("plan: need at least one shell");
  if (angular_degree < 0) angular_degree = 2 * l_max + 1;
  if (angular_degree < 2 * l_max)
    throw std::invalid_argument("plan: l_max exceeds the angular node resolution");
  const GaussRule gl = gauss_legendre(n_shells, 0.0, L);
  radii_ = gl.x;
  radial_w_ = gl.w;
  sq_ = build_sphere_quadrature(angular_degree, SphereBackend::product);
  Y_.resize(static_cast<int>(sq_.nodes.size()), n_coeff());
  std::vector<double> row(n_coeff());
  for (std::size_t q = 0; q < sq_.nodes.size(); ++q) {
    real_spherical_harmonics(l_max_, sq_.nodes[q], row.data());
    for (int c = 0; c < n_coeff(); ++c) Y_(static_cast<int>(q), c) = row[c];
  }
}

Vector SphericalHarmonicPlan::analyze(const Vector& shell_values) const {
  Vector wv = shell_values;
  for (int q = 0; q < wv.size(); ++q) wv[q] *= sq_.weights[q];
  return Y_.transpose() * wv;
}

Vector SphericalHarmonicPlan::synthesize(const Vector& coeffs) const { return Y_ * coeffs; }

DistributionField apply_anisotropic_weight(const DistributionField& f, const KernelParams& p,
                                           const SphericalHarmonicPlan& plan) {
  const CharacteristicWeight W(p);
  const int ns = static_cast<int>(plan.radii().size());
  const int nq = static_cast<int>(plan.angular().nodes.size());
  const int nc = plan.n_coeff();
  // (W_l - 1) c_lm per shell
  std::vector<Vector> delta(ns);
  Vector factor(nc);
  for (int l = 0; l <= plan.l_max(); ++l)
    for (int m = -l; m <= l; ++m) factor[sh_index(l, m)] = W(std::sqrt(l * (l + 1.0))) - 1.0;
  for (int s = 0; s < ns; ++s) {
    Vector vals(nq);
    for (int q = 0; q < nq; ++q)
      vals[q] = interpolate_trilinear(f.grid, f.values.data(), plan.radii()[s] * plan.angular().nodes[q]);
    delta[s] = plan.analyze(vals).cwiseProduct(factor);
  }
  // Unresolved content (l > l_max) passes through unweighted.
  DistributionField out = f;
  std::vector<double> y(nc);
  const auto& R = plan.radii();
  for (int k = 0; k < f.grid.size(); ++k) {
    const Vec3 v = f.grid.node(k);
    const double r = v.norm();
    if (r == 0.0) continue;
    real_spherical_harmonics(plan.l_max(), v / r, y.data());
    int s0 = 0;
    double a = 0.0;
    if (r <= R.front()) {
      s0 = 0;
    } else if (r >= R.back()) {
      s0 = ns - 1;
    } else {
      while (s0 + 1 < ns && R[s0 + 1] < r) ++s0;
      a = (r - R[s0]) / (R[s0 + 1] - R[s0]);
    }
    double acc = 0.0;
    for (int c = 0; c < nc; ++c) {
      const double coef = a == 0.0 ? delta[s0][c] : (1.0 - a) * delta[s0][c] + a * delta[s0 + 1][c];
      acc += coef * y[c];
    }
    out.values[k] += acc;
  }
  return out;
}

double TripleNormParts::total() const {
  return std::sqrt(anisotropic * anisotropic + fourier * fourier + phase * phase);
}

TripleNormParts triple_norm_parts(const DistributionField& f, const KernelParams& p, double l,
                                  const SphericalHarmonicPlan& plan) {
  const DistributionField g = apply_polynomial_weight(f, l);
  TripleNormParts t;
  t.anisotropic = weighted_l2_norm(apply_anisotropic_weight(g, p, plan), 0.0);
  t.fourier = weighted_l2_norm(apply_fourier_weight(g, p), 0.0);
  t.phase = weighted_l2_norm(apply_phase_weight(g, p), 0.0);
  return t;
}

double triple_norm(const DistributionField& f, const KernelParams& p, double l,
                   const SphericalHarmonicPlan& plan) {
  return triple_norm_parts(f, p, l, plan).total();
}

}  // namespace grazing
