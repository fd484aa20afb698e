#include "grazing/operators.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "grazing/quadrature.hpp"
#include "grazing/sphere.hpp"
#include "internal.hpp"

namespace grazing {

using namespace detail;

namespace {

constexpr double kPi = std::numbers::pi;

Vector mu_values(const VelocityGrid& g) { return maxwellian(g).values; }

// Large-angle band contribution to Q(mu ghat, mu hhat).
Vector large_angle_core(const KernelParams& p, const AngularRule& rule, const VelocityGrid& grid,
                        const Vector& ghat, const Vector& hhat, int threads) {
  const int n = grid.n(), N = grid.size();
  const double h = grid.h(), w = grid.weight();
  const BandRule band = band_rule(p, rule);
  Vector out = Vector::Zero(N);
  if (band.size() == 0) return out;
  const Vector mu = mu_values(grid);
  const int K = band.size();
  const int span = 2 * n - 1;
  std::vector<Vector> partial(span);
  parallel_chunks(span, threads, [&](int cx) {
    Vector buf = Vector::Zero(N);
    std::vector<double> dl(3 * K), coef(K);
    PointStencil ps, qs;
    const int dx = cx - (n - 1);
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Vec3 u(dx * h, dy * h, dz * h);
        const double r = u.norm();
        if (r < p.eta) continue;
        const double Bu = std::pow(r, p.gamma);
        const Vec3 uh = u / r;
        Vec3 e1, e2;
        collision_frame(uh, e1, e2);
        for (int k = 0; k < K; ++k) {
          const Vec3 sig = band.cos_theta[k] * uh +
                           band.sin_theta[k] * (band.cos_phi[k] * e1 + band.sin_phi[k] * e2);
          const Vec3 d = 0.5 * (r * sig - u) / h;
          dl[3 * k] = d[0];
          dl[3 * k + 1] = d[1];
          dl[3 * k + 2] = d[2];
          coef[k] = -0.5 * w * Bu * band.weight[k];
        }
        const int x0 = std::max(0, dx), x1 = std::min(n - 1, n - 1 + dx);
        const int y0 = std::max(0, dy), y1 = std::min(n - 1, n - 1 + dy);
        const int z0 = std::max(0, dz), z1 = std::min(n - 1, n - 1 + dz);
        for (int k = 0; k < K; ++k) {
          const double ddx = dl[3 * k], ddy = dl[3 * k + 1], ddz = dl[3 * k + 2];
          for (int ix = x0; ix <= x1; ++ix)
            for (int iy = y0; iy <= y1; ++iy)
              for (int iz = z0; iz <= z1; ++iz) {
                const int i = (ix * n + iy) * n + iz;
                const int j = ((ix - dx) * n + (iy - dy)) * n + (iz - dz);
                point_stencil(ix + ddx, iy + ddy, iz + ddz, n, ps);
                point_stencil(ix - dx - ddx, iy - dy - ddy, iz - dz - ddz, n, qs);
                const double gain = interp(ghat.data(), qs) * interp(hhat.data(), ps);
                const double val = coef[k] * mu[i] * mu[j] * (gain - ghat[j] * hhat[i]);
                deposit(buf.data(), ps, val);
                buf[i] -= val;
              }
        }
      }
    partial[cx] = std::move(buf);
  });
  for (int c = 0; c < span; ++c) out += partial[c];
  return out;
}

}  // namespace

void AngularRule::validate() const {
  if (n_t < 1) throw std::invalid_argument("angular rule: n_t must be >= 1");
  if (n_phi < 2 || n_phi % 2 != 0) throw std::invalid_argument("angular rule: n_phi must be even");
  if (!(split > 0.0 && split < kSqrtHalf)) throw std::invalid_argument("angular rule: split must lie in (0, sqrt(1/2))");
}

double grazing_coefficient(const KernelParams& p, const AngularRule& r) {
  if (p.epsilon >= r.split) return 0.0;
  return std::log(r.split / p.epsilon) / p.log_eps();
}

BandRule band_rule(const KernelParams& p, const AngularRule& r) {
  p.validate();
  r.validate();
  BandRule b;
  const double lo = std::max(p.epsilon, r.split), hi = p.t_max();
  if (!(hi > lo)) return b;
  const GaussRule gl = gauss_legendre(r.n_t, std::log(lo), std::log(hi));
  for (int a = 0; a < r.n_t; ++a) {
    const double t = std::exp(gl.x[a]);
    const double ct = 1.0 - 2.0 * t * t;
    const double st = 2.0 * t * std::sqrt(1.0 - t * t);
    const double wt = angular_b_t(p, t) * 4.0 * t * t * gl.w[a] * 2.0 * kPi / r.n_phi;
    for (int j = 0; j < r.n_phi; ++j) {
      const double ph = 2.0 * kPi * (j + 0.5) / r.n_phi;
      b.cos_theta.push_back(ct);
      b.sin_theta.push_back(st);
      b.cos_phi.push_back(std::cos(ph));
      b.sin_phi.push_back(std::sin(ph));
      b.weight.push_back(wt);
    }
  }
  return b;
}

void collision_frame(const Vec3& uh, Vec3& e1, Vec3& e2) {
  int a = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(uh[k]) < std::abs(uh[a])) a = k;
  Vec3 axis = Vec3::Zero();
  axis[a] = 1.0;
  e1 = axis.cross(uh).normalized();
  e2 = uh.cross(e1);
}

void parallel_chunks(int n_chunks, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n_chunks <= 1) {
    for (int c = 0; c < n_chunks; ++c) fn(c);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int nt = std::min(threads, n_chunks);
  for (int t = 0; t < nt; ++t)
    pool.emplace_back([&] {
      for (int c = next++; c < n_chunks; c = next++) fn(c);
    });
  for (auto& th : pool) th.join();
}

namespace detail {

// D^+/D^- averaged Landau operator, returns Q^L(mu ghat, mu hhat).
Vector landau_core(const VelocityGrid& grid, const Vector& ghat, const Vector& hhat,
                   double k_const, double gamma, double eta, int threads) {
  const int n = grid.n(), N = grid.size();
  const double h = grid.h(), w = grid.weight();
  const Vector mu = mu_values(grid);
  const PairTable tab = pair_table(grid, k_const, gamma, eta);
  Vector out = Vector::Zero(N);
  for (int s : {1, -1}) {
    const int lo = s > 0 ? 0 : 1, hi = s > 0 ? n - 2 : n - 1;
    // forward (s=+1) or backward differences on the admissible block
    std::vector<double> Dg(3 * N, 0.0), Dh(3 * N, 0.0);
    const int stride[3] = {n * n, n, 1};
    for (int ix = lo; ix <= hi; ++ix)
      for (int iy = lo; iy <= hi; ++iy)
        for (int iz = lo; iz <= hi; ++iz) {
          const int i = (ix * n + iy) * n + iz;
          for (int a = 0; a < 3; ++a) {
            const int nb = i + s * stride[a];
            Dg[3 * i + a] = s * (ghat[nb] - ghat[i]) / h;
            Dh[3 * i + a] = s * (hhat[nb] - hhat[i]) / h;
          }
        }
    const int m = hi - lo + 1;
    std::vector<double> U(3 * N, 0.0);
    parallel_chunks(m, threads, [&](int cx) {
      const int ix = lo + cx;
      double y[3], x[3];
      for (int iy = lo; iy <= hi; ++iy)
        for (int iz = lo; iz <= hi; ++iz) {
          const int i = (ix * n + iy) * n + iz;
          double acc[3] = {0, 0, 0};
          for (int jx = lo; jx <= hi; ++jx)
            for (int jy = lo; jy <= hi; ++jy)
              for (int jz = lo; jz <= hi; ++jz) {
                const int k = tab.idx(ix - jx, iy - jy, iz - jz);
                if (tab.c[k] == 0.0) continue;
                const int j = (jx * n + jy) * n + jz;
                const double gj = mu[j] * ghat[j], hi_ = hhat[i];
                for (int a = 0; a < 3; ++a) x[a] = gj * Dh[3 * i + a] - hi_ * mu[j] * Dg[3 * j + a];
                apply_pair(tab, k, x, y);
                acc[0] += y[0];
                acc[1] += y[1];
                acc[2] += y[2];
              }
          for (int a = 0; a < 3; ++a) U[3 * i + a] = w * mu[i] * acc[a];
        }
    });
    for (int ix = lo; ix <= hi; ++ix)
      for (int iy = lo; iy <= hi; ++iy)
        for (int iz = lo; iz <= hi; ++iz) {
          const int i = (ix * n + iy) * n + iz;
          for (int a = 0; a < 3; ++a) {
            const double v = -0.5 * U[3 * i + a] * s / h;
            out[i + s * stride[a]] += v;
            out[i] -= v;
          }
        }
  }
  return out;
}

}  // namespace detail

Vector collision_core(const CollisionModel& m, const VelocityGrid& g, const Vector& ghat,
                      const Vector& hhat) {
  m.params.validate();
  if (ghat.size() != g.size() || hhat.size() != g.size()) throw GridMismatch("collision_core: size mismatch");
  if (m.kind == Model::landau)
    return detail::landau_core(g, ghat, hhat, m.params.k_const, m.params.gamma, m.params.eta, m.threads);
  Vector out = large_angle_core(m.params, m.rule, g, ghat, hhat, m.threads);
  const double c = grazing_coefficient(m.params, m.rule);
  if (c > 0.0)
    out += c * detail::landau_core(g, ghat, hhat, 1.0, m.params.gamma, m.params.eta, m.threads);
  return out;
}

namespace {

Vector divide(const Vector& a, const Vector& b) { return a.cwiseQuotient(b); }

Vector sqrt_mu(const VelocityGrid& g) { return mu_values(g).cwiseSqrt(); }

// multiply by mu^{-1/2}, zero where mu^{1/2} underflows the guard
Vector unconjugate(const Vector& q, const Vector& smu) {
  Vector out(q.size());
  for (int k = 0; k < q.size(); ++k) out[k] = smu[k] > 1e-300 ? q[k] / smu[k] : 0.0;
  return out;
}

}  // namespace

DistributionField collision_apply(const CollisionModel& m, const DistributionField& g,
                                  const DistributionField& h) {
  require_same_grid(g, h);
  const Vector mu = mu_values(g.grid);
  return DistributionField(g.grid, collision_core(m, g.grid, divide(g.values, mu), divide(h.values, mu)),
                           FieldRole::density);
}

DistributionField collision_bilinear(const KernelParams& p, const DistributionField& g,
                                     const DistributionField& h, const AngularRule& rule) {
  return collision_apply(CollisionModel::boltzmann(p, rule), g, h);
}

DistributionField landau_bilinear(const DistributionField& g, const DistributionField& h,
                                  double k_const, double gamma, double eta) {
  KernelParams p;
  p.k_const = k_const;
  p.gamma = gamma;
  p.eta = eta;
  return collision_apply(CollisionModel::landau(p), g, h);
}

DistributionField gamma_bilinear(const CollisionModel& m, const DistributionField& g,
                                 const DistributionField& h) {
  require_same_grid(g, h);
  const Vector smu = sqrt_mu(g.grid);
  const Vector q = collision_core(m, g.grid, divide(g.values, smu), divide(h.values, smu));
  return DistributionField(g.grid, unconjugate(q, smu), FieldRole::perturbation);
}

DistributionField linearized_apply(const CollisionModel& m, const DistributionField& f) {
  const Vector smu = sqrt_mu(f.grid);
  const Vector one = Vector::Ones(f.grid.size());
  const Vector psi = divide(f.values, smu);
  const Vector q = collision_core(m, f.grid, one, psi) + collision_core(m, f.grid, psi, one);
  return DistributionField(f.grid, -unconjugate(q, smu), FieldRole::perturbation);
}

DistributionField remainder_I(const CollisionModel& m, const DistributionField& g,
                              const DistributionField& h) {
  require_same_grid(g, h);
  const Vector mu = mu_values(g.grid);
  const Vector smu = mu.cwiseSqrt();
  const Vector ghat = divide(g.values, smu);
  const Vector gam = unconjugate(collision_core(m, g.grid, ghat, divide(h.values, smu)), smu);
  const Vector q = collision_core(m, g.grid, ghat, divide(h.values, mu));
  return DistributionField(g.grid, gam - q, FieldRole::perturbation);
}

double dissipation_functional(const CollisionModel& m, const DistributionField& gf,
                              const DistributionField& hf) {
  require_same_grid(gf, hf);
  const KernelParams& p = m.params;
  p.validate();
  const VelocityGrid& grid = gf.grid;
  const int n = grid.n();
  const double h = grid.h(), w = grid.weight();
  const Vector& g = gf.values;
  const Vector& hv = hf.values;
  double total = 0.0;
  // large-angle band with interpolated h'
  const BandRule band = m.kind == Model::boltzmann ? band_rule(p, m.rule) : BandRule{};
  for (int dx = -(n - 1); dx <= n - 1; ++dx)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        if ((dx == 0 && dy == 0 && dz == 0) || band.size() == 0) continue;
        const Vec3 u(dx * h, dy * h, dz * h);
        const double r = u.norm();
        if (r < p.eta) continue;
        const Vec3 uh = u / r;
        Vec3 e1, e2;
        collision_frame(uh, e1, e2);
        const double Bu = std::pow(r, p.gamma);
        for (int k = 0; k < band.size(); ++k) {
          const Vec3 sig = band.cos_theta[k] * uh + band.sin_theta[k] * (band.cos_phi[k] * e1 + band.sin_phi[k] * e2);
          const Vec3 d = 0.5 * (r * sig - u) / h;
          double acc = 0.0;
          PointStencil ps;
          for (int ix = std::max(0, dx); ix <= std::min(n - 1, n - 1 + dx); ++ix)
            for (int iy = std::max(0, dy); iy <= std::min(n - 1, n - 1 + dy); ++iy)
              for (int iz = std::max(0, dz); iz <= std::min(n - 1, n - 1 + dz); ++iz) {
                const int i = (ix * n + iy) * n + iz;
                const int j = ((ix - dx) * n + (iy - dy)) * n + (iz - dz);
                point_stencil(ix + d[0], iy + d[1], iz + d[2], n, ps);
                const double diff = interp(hv.data(), ps) - hv[i];
                acc += g[j] * g[j] * diff * diff;
              }
          total += w * w * Bu * band.weight[k] * acc;
        }
      }
  // grazing band: leading term 4 pi |u|^{gamma+2} c (grad h)^T Pi (grad h), i.e. 2 c a(u)
  double cg = m.kind == Model::landau ? 0.5 * p.k_const : grazing_coefficient(p, m.rule);
  if (cg > 0.0) {
    const PairTable tab = pair_table(grid, 1.0, p.gamma, p.eta);
    const int stride[3] = {n * n, n, 1};
    for (int i = 0; i < grid.size(); ++i) {
      const auto mi = grid.multi_index(i);
      // average over the available one-sided gradients
      double quad = 0.0;
      int count = 0;
      for (int s : {1, -1}) {
        bool ok = true;
        for (int a = 0; a < 3; ++a) ok = ok && (mi[a] + s >= 0 && mi[a] + s < n);
        if (!ok) continue;
        double D[3];
        for (int a = 0; a < 3; ++a) D[a] = s * (hv[i + s * stride[a]] - hv[i]) / h;
        double acc = 0.0, y[3];
        for (int j = 0; j < grid.size(); ++j) {
          if (j == i) continue;
          const auto mj = grid.multi_index(j);
          const int k = tab.idx(mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]);
          if (tab.c[k] == 0.0) continue;
          apply_pair(tab, k, D, y);
          acc += g[j] * g[j] * (D[0] * y[0] + D[1] * y[1] + D[2] * y[2]);
        }
        quad += acc;
        ++count;
      }
      if (count) total += w * w * 2.0 * cg * quad / count;
    }
  }
  return total;
}

double CancellationResult::rel_error() const {
  return std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300);
}

CancellationResult cancellation_identity(const KernelParams& p,
                                         const std::function<double(const Vec3&)>& g,
                                         const std::function<double(const Vec3&)>& h,
                                         const VelocityGrid& grid, double delta,
                                         const CancellationResolution& res) {
  p.validate();
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  if (p.gamma != -3.0) throw DomainError("cancellation identity is stated for gamma = -3");
  // lattice nodes carrying g
  std::vector<Vec3> nodes;
  std::vector<double> gv;
  double gmax = 0.0;
  for (int k = 0; k < grid.size(); ++k) gmax = std::max(gmax, std::abs(g(grid.node(k))));
  CancellationResult out;
  if (gmax == 0.0) return out;
  for (int k = 0; k < grid.size(); ++k) {
    const double v = g(grid.node(k));
    if (std::abs(v) > 1e-20 * gmax) {
      nodes.push_back(grid.node(k));
      gv.push_back(v * grid.weight());
    }
  }
  // C(x) = \int g(v_*) h(v_* + x) dv_*
  auto C = [&](const Vec3& x) {
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes.size(); ++q) acc += gv[q] * h(nodes[q] + x);
    return acc;
  };
  const SphereQuadrature dirs = build_sphere_quadrature(res.dir_degree, SphereBackend::product);
  // lhs. Below t_c the azimuthal mean of C(u + d) - C(u) is O(t^2) while each
  // term is O(t), so it is replaced by its second-order expansion
  // r t^2 [-d_u C + (r/4)(d_e1^2 C + d_e2^2 C)], derivatives by central differences.
  {
    const double t_c = 1e-3;
    const double t_lo = std::max(p.epsilon, t_c);
    const GaussRule rad = gauss_legendre(res.n_radial, delta, res.r_max);
    const GaussRule lt = gauss_legendre(res.n_t, std::log(t_lo), std::log(kSqrtHalf));
    double w_small = 0.0;
    if (p.epsilon < t_c) {
      const GaussRule st = gauss_legendre(res.n_t, std::log(p.epsilon), std::log(t_c));
      for (int b = 0; b < res.n_t; ++b) {
        const double t = std::exp(st.x[b]);
        w_small += st.w[b] * angular_b_t(p, t) * 4.0 * t * t * t * t * 2.0 * kPi;
      }
    }
    const double fd = 1e-3;
    double lhs = 0.0;
    for (int a = 0; a < res.n_radial; ++a) {
      const double r = rad.x[a];
      const double wr = rad.w[a] * r * r * std::pow(r, p.gamma);
      for (std::size_t q = 0; q < dirs.nodes.size(); ++q) {
        const Vec3 uh = dirs.nodes[q];
        const Vec3 u = r * uh;
        Vec3 e1, e2;
        collision_frame(uh, e1, e2);
        const double c0 = C(u);
        double inner_sum = 0.0;
        for (int b = 0; b < res.n_t; ++b) {
          const double t = std::exp(lt.x[b]);
          const double ct = 1.0 - 2.0 * t * t, st = 2.0 * t * std::sqrt(1.0 - t * t);
          const double wt = angular_b_t(p, t) * 4.0 * t * t * lt.w[b] * 2.0 * kPi / res.n_phi;
          double acc = 0.0;
          for (int j = 0; j < res.n_phi; ++j) {
            const double ph = 2.0 * kPi * (j + 0.5) / res.n_phi;
            const Vec3 sig = ct * uh + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
            const Vec3 d = 0.5 * (r * sig - u);
            acc += C(u + d) - c0;
          }
          inner_sum += wt * acc;
        }
        if (w_small != 0.0) {
          const double du = (C(u + fd * uh) - C(u - fd * uh)) / (2.0 * fd);
          const double h1 = (C(u + fd * e1) - 2.0 * c0 + C(u - fd * e1)) / (fd * fd);
          const double h2 = (C(u + fd * e2) - 2.0 * c0 + C(u - fd * e2)) / (fd * fd);
          inner_sum += w_small * r * (-du + 0.25 * r * (h1 + h2));
        }
        lhs += wr * dirs.weights[q] * inner_sum;
      }
    }
    out.lhs = lhs;
  }
  // rhs over the support delta/sqrt(2) <= |z| <= delta, in tau = sqrt(1 - (z/delta)^2):
  // S ~ tau^{-2} for tau > eps, so ln tau is the smooth variable there.
  {
    double rhs = 0.0;
    auto add = [&](double tau, double dz_dtau_w) {
      const double z = delta * std::sqrt(1.0 - tau * tau);
      const double S = cancellation_J_tau(p, tau) / (delta * delta * delta);
      double acc = 0.0;
      for (std::size_t q = 0; q < dirs.nodes.size(); ++q) acc += dirs.weights[q] * C(z * dirs.nodes[q]);
      rhs += dz_dtau_w * z * z * S * acc;
    };
    const GaussRule outer = gauss_legendre(res.n_z, std::log(p.epsilon), std::log(kSqrtHalf));
    for (int k = 0; k < res.n_z; ++k) {
      const double tau = std::exp(outer.x[k]);
      add(tau, outer.w[k] * delta * tau * tau / std::sqrt(1.0 - tau * tau));
    }
    const GaussRule inner = gauss_legendre(res.n_z, 0.0, p.epsilon);
    for (int k = 0; k < res.n_z; ++k) {
      const double tau = inner.x[k];
      add(tau, inner.w[k] * delta * tau / std::sqrt(1.0 - tau * tau));
    }
    out.rhs = rhs;
  }
  return out;
}

double operator_difference(const KernelParams& p, const DistributionField& g,
                           const DistributionField& h, const DistributionField& f, double l,
                           const AngularRule& rule) {
  require_same_grid(g, h);
  require_same_grid(g, f);
  const DistributionField gl = gamma_bilinear(CollisionModel::landau(p), g, h);
  const DistributionField ge = gamma_bilinear(CollisionModel::boltzmann(p, rule), g, h);
  DistributionField diff(g.grid, gl.values - ge.values);
  return inner(apply_polynomial_weight(diff, l), f);
}

double weak_form(const WeakFormSpec& spec, const DistributionField& G, const DistributionField& H,
                 const std::function<double(const Vec3&)>& chi) {
  require_same_grid(G, H);
  const VelocityGrid& grid = G.grid;
  const KernelParams& p = spec.params;
  if (spec.mode == WeakMode::grid_field) {
    const DistributionField q = collision_bilinear(p, G, H, spec.rule);
    return inner(q, sample(grid, chi));
  }
  const int N = grid.size();
  const double w = grid.weight();
  const double slo = std::log(p.epsilon), shi = std::log(p.t_max());
  auto integrand = [&](int i, int j, double s, double ph) {
    const Vec3 vi = grid.node(i), vj = grid.node(j);
    const Vec3 u = vi - vj;
    const double r = u.norm();
    if (r < p.eta) return 0.0;
    const double t = std::exp(s);
    const Vec3 uh = u / r;
    Vec3 e1, e2;
    collision_frame(uh, e1, e2);
    const double ct = 1.0 - 2.0 * t * t, st = 2.0 * t * std::sqrt(1.0 - t * t);
    const Vec3 sig = ct * uh + st * (std::cos(ph) * e1 + std::sin(ph) * e2);
    const Vec3 vp = post_collision(vi, vj, sig).first;
    return std::pow(r, p.gamma) * angular_b_t(p, t) * 4.0 * t * t * G[j] * H[i] * (chi(vp) - chi(vi));
  };
  if (spec.mode == WeakMode::direct) {
    const GaussRule lt = gauss_legendre(spec.direct_n_t, slo, shi);
    double total = 0.0;
    for (int i = 0; i < N; ++i) {
      if (H[i] == 0.0) continue;
      for (int j = 0; j < N; ++j) {
        if (j == i || G[j] == 0.0) continue;
        for (int b = 0; b < spec.direct_n_t; ++b)
          for (int k = 0; k < spec.direct_n_phi; ++k)
            total += lt.w[b] * (2.0 * kPi / spec.direct_n_phi) *
                     integrand(i, j, lt.x[b], 2.0 * kPi * (k + 0.5) / spec.direct_n_phi);
      }
    }
    return total * w * w;
  }
  // nodes drawn in proportion to |H_i| |G_j|; (ln t, phi) stratified on an 8 x 8 grid
  std::vector<double> ah(N), ag(N);
  double sh = 0.0, sg = 0.0;
  for (int i = 0; i < N; ++i) {
    ah[i] = std::abs(H[i]);
    ag[i] = std::abs(G[i]);
    sh += ah[i];
    sg += ag[i];
  }
  if (sh == 0.0 || sg == 0.0) return 0.0;
  std::mt19937_64 rng(spec.seed);
  std::discrete_distribution<int> pick_h(ah.begin(), ah.end()), pick_g(ag.begin(), ag.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kStrata = 8;
  double acc = 0.0;
  for (std::int64_t s = 0; s < spec.samples; ++s) {
    const int i = pick_h(rng), j = pick_g(rng);
    const int cell = static_cast<int>(s % (kStrata * kStrata));
    const double lt = slo + (shi - slo) * ((cell / kStrata) + unit(rng)) / kStrata;
    const double ph = 2.0 * kPi * ((cell % kStrata) + unit(rng)) / kStrata;
    if (i != j) acc += integrand(i, j, lt, ph) / (ah[i] * ag[j]);
  }
  return acc / spec.samples * sh * sg * (shi - slo) * 2.0 * kPi * w * w;
}

}  // namespace grazing
