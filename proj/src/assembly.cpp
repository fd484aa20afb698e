#include <cmath>
#include <numbers>

#include "grazing/spectral.hpp"
#include "internal.hpp"

namespace grazing {

using namespace detail;

namespace {

// f-space matrix of the large-angle band:
// M_ab = (1/2) w sum_{unordered pairs, k} B mu_i mu_j r_a r_b / sqrt(mu_a mu_b),
// r = I(v') + I(v'_*) - e_i - e_j.
Matrix assemble_band(const VelocityGrid& grid, const KernelParams& p, const AngularRule& rule) {
  const int n = grid.n(), N = grid.size();
  const double h = grid.h(), w = grid.weight();
  const BandRule band = band_rule(p, rule);
  Matrix M = Matrix::Zero(N, N);
  if (band.size() == 0) return M;
  const Vector mu = maxwellian(grid).values;
  const Vector inv_smu = mu.cwiseSqrt().cwiseInverse();
  const int K = band.size();
  double* data = M.data();
  std::vector<int> slot(N, -1);
  int idx[40];
  double val[40];
  PointStencil ps, qs;
  for (int dx = 0; dx <= n - 1; ++dx)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        // one representative per unordered pair
        if (dx == 0 && (dy < 0 || (dy == 0 && dz <= 0))) continue;
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
          const double coef = 0.5 * w * Bu * band.weight[k];
          for (int ix = std::max(0, dx); ix <= std::min(n - 1, n - 1 + dx); ++ix)
            for (int iy = std::max(0, dy); iy <= std::min(n - 1, n - 1 + dy); ++iy)
              for (int iz = std::max(0, dz); iz <= std::min(n - 1, n - 1 + dz); ++iz) {
                const int i = (ix * n + iy) * n + iz;
                const int j = ((ix - dx) * n + (iy - dy)) * n + (iz - dz);
                point_stencil(ix + d[0], iy + d[1], iz + d[2], n, ps);
                point_stencil(ix - dx - d[0], iy - dy - d[1], iz - dz - d[2], n, qs);
                int m = 0;
                auto add = [&](int a, double v) {
                  if (slot[a] < 0) {
                    slot[a] = m;
                    idx[m] = a;
                    val[m] = v;
                    ++m;
                  } else {
                    val[slot[a]] += v;
                  }
                };
                for (int q = 0; q < 15; ++q) add(ps.idx[q], ps.w[q]);
                for (int q = 0; q < 15; ++q) add(qs.idx[q], qs.w[q]);
                add(i, -1.0);
                add(j, -1.0);
                const double scale = std::sqrt(coef * mu[i] * mu[j]);
                for (int q = 0; q < m; ++q) {
                  slot[idx[q]] = -1;
                  val[q] *= scale * inv_smu[idx[q]];
                }
                for (int q = 0; q < m; ++q) {
                  double* col = data + static_cast<std::ptrdiff_t>(idx[q]) * N;
                  const double vq = val[q];
                  for (int pp = 0; pp < m; ++pp)
                    if (idx[pp] <= idx[q]) col[idx[pp]] += val[pp] * vq;
                }
              }
        }
      }
  for (int b = 0; b < N; ++b)
    for (int a = 0; a < b; ++a) M(b, a) = M(a, b);
  return M;
}

// f-space matrix of the D^+/D^- Landau form
// (1/4) sum_pm sum_{i != j} w^2 mu_i mu_j (D chi_i - D chi_j)^T a_ij (D psi_i - D psi_j).
Matrix assemble_landau(const VelocityGrid& grid, double k_const, double gamma, double eta) {
  const int n = grid.n(), N = grid.size();
  const double h = grid.h(), w = grid.weight();
  const Vector mu = maxwellian(grid).values;
  const PairTable tab = pair_table(grid, k_const, gamma, eta);
  Matrix P = Matrix::Zero(N, N);  // psi-space, symmetric, filled by columns
  const int stride[3] = {n * n, n, 1};
  Matrix R(N, 3);
  for (int s : {1, -1}) {
    const int lo = s > 0 ? 0 : 1, hi = s > 0 ? n - 2 : n - 1;
    const double sh = s / h;
    for (int ix = lo; ix <= hi; ++ix)
      for (int iy = lo; iy <= hi; ++iy)
        for (int iz = lo; iz <= hi; ++iz) {
          const int i = (ix * n + iy) * n + iz;
          R.setZero();
          double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
          for (int jx = lo; jx <= hi; ++jx)
            for (int jy = lo; jy <= hi; ++jy)
              for (int jz = lo; jz <= hi; ++jz) {
                const int k = tab.idx(ix - jx, iy - jy, iz - jz);
                if (tab.c[k] == 0.0) continue;
                const int j = (jx * n + jy) * n + jz;
                const double c = tab.c[k] * w * w * mu[i] * mu[j];
                const double* q = &tab.uu[6 * k];
                const double a[3][3] = {{c * (1 - q[0]), -c * q[3], -c * q[5]},
                                        {-c * q[3], c * (1 - q[1]), -c * q[4]},
                                        {-c * q[5], -c * q[4], c * (1 - q[2])}};
                for (int r = 0; r < 3; ++r) {
                  for (int b = 0; b < 3; ++b) {
                    A[r][b] += a[r][b];
                    // - a_ij D_j: D_j has -s/h at j and +s/h at j + s e_b
                    R(j, r) += sh * a[r][b];
                    R(j + s * stride[b], r) -= sh * a[r][b];
                  }
                }
              }
          // + A_i D_i
          for (int r = 0; r < 3; ++r)
            for (int b = 0; b < 3; ++b) {
              R(i, r) -= sh * A[r][b];
              R(i + s * stride[b], r) += sh * A[r][b];
            }
          // P += (1/2) D_i^T R_i^T
          for (int r = 0; r < 3; ++r) {
            P.col(i + s * stride[r]) += 0.5 * sh * R.col(r);
            P.col(i) -= 0.5 * sh * R.col(r);
          }
        }
  }
  const Vector inv_smu = mu.cwiseSqrt().cwiseInverse();
  Matrix M = inv_smu.asDiagonal() * P * inv_smu.asDiagonal();
  M /= w;
  return 0.5 * (M + M.transpose());
}

}  // namespace

LinearOperatorMatrix assemble_linearized(const CollisionModel& m, const VelocityGrid& g) {
  m.params.validate();
  if (g.size() > kMaxAssemblyNodes) throw ResourceGuard("assembly: node count exceeds the cap");
  LinearOperatorMatrix out;
  out.grid = g;
  const KernelParams& p = m.params;
  if (m.kind == Model::landau) {
    out.M = assemble_landau(g, p.k_const, p.gamma, p.eta);
    out.label = "landau";
  } else {
    out.M = assemble_band(g, p, m.rule);
    const double c = grazing_coefficient(p, m.rule);
    if (c > 0.0) out.M += c * assemble_landau(g, 1.0, p.gamma, p.eta);
    out.label = "boltzmann";
  }
  out.asymmetry = 0.0;
  return out;
}

Matrix assemble_columns(const CollisionModel& m, const VelocityGrid& g, const std::vector<int>& cols) {
  std::vector<int> list = cols;
  if (list.empty())
    for (int j = 0; j < g.size(); ++j) list.push_back(j);
  Matrix C(g.size(), static_cast<int>(list.size()));
  for (std::size_t c = 0; c < list.size(); ++c) {
    DistributionField d(g);
    d.values[list[c]] = 1.0;
    C.col(static_cast<int>(c)) = linearized_apply(m, d).values;
  }
  return C;
}

LinearizedFamily::LinearizedFamily(const VelocityGrid& g, double gamma, double eta,
                                   const AngularRule& rule, bool symmetrized)
    : grid_(g), gamma_(gamma), eta_(eta), rule_(rule), symmetrized_(symmetrized) {
  if (g.size() > kMaxAssemblyNodes) throw ResourceGuard("assembly: node count exceeds the cap");
  rule_.validate();
  landau_unit_ = assemble_landau(g, 1.0, gamma, eta);
  KernelParams p;
  p.epsilon = std::min(1e-3, 0.5 * rule.split);
  p.gamma = gamma;
  p.eta = eta;
  p.symmetrized = symmetrized;
  band_raw_ = assemble_band(g, p, rule) * p.log_eps();
}

LinearOperatorMatrix LinearizedFamily::boltzmann(double epsilon) const {
  KernelParams p;
  p.epsilon = epsilon;
  p.gamma = gamma_;
  p.eta = eta_;
  p.symmetrized = symmetrized_;
  p.validate();
  LinearOperatorMatrix out;
  out.grid = grid_;
  out.label = "boltzmann";
  if (epsilon < rule_.split) {
    out.M = grazing_coefficient(p, rule_) * landau_unit_ + band_raw_ / p.log_eps();
  } else {
    out.M = assemble_band(grid_, p, rule_);
  }
  return out;
}

LinearOperatorMatrix LinearizedFamily::landau(double k_const) const {
  LinearOperatorMatrix out;
  out.grid = grid_;
  out.label = "landau";
  out.M = k_const * landau_unit_;
  return out;
}

}  // namespace grazing
