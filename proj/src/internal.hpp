#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "grazing/grid.hpp"

namespace grazing::detail {

// Trilinear weights on the cell containing x plus a second-difference
// correction at the nearest interior node; exact on polynomials of degree <= 2.
// Coordinates are in lattice units (node i sits at i); cells are clamped to the
// box so points outside extrapolate.
struct PointStencil {
  int idx[15];
  double w[15];
};

inline void point_stencil(double x, double y, double z, int n, PointStencil& s) {
  const double p[3] = {x, y, z};
  int i0[3], m[3];
  double f[3], k[3];
  for (int a = 0; a < 3; ++a) {
    int c = static_cast<int>(std::floor(p[a]));
    c = c < 0 ? 0 : (c > n - 2 ? n - 2 : c);
    i0[a] = c;
    f[a] = p[a] - c;
    int r = static_cast<int>(std::floor(p[a] + 0.5));
    m[a] = r < 1 ? 1 : (r > n - 2 ? n - 2 : r);
    k[a] = 0.5 * f[a] * (1.0 - f[a]);
  }
  int q = 0;
  for (int a = 0; a < 2; ++a) {
    const double wa = a ? f[0] : 1.0 - f[0];
    for (int b = 0; b < 2; ++b) {
      const double wb = wa * (b ? f[1] : 1.0 - f[1]);
      for (int c = 0; c < 2; ++c) {
        s.idx[q] = ((i0[0] + a) * n + i0[1] + b) * n + i0[2] + c;
        s.w[q] = wb * (c ? f[2] : 1.0 - f[2]);
        ++q;
      }
    }
  }
  const int mid = (m[0] * n + m[1]) * n + m[2];
  const int stride[3] = {n * n, n, 1};
  s.idx[q] = mid;
  s.w[q] = 2.0 * (k[0] + k[1] + k[2]);
  ++q;
  for (int a = 0; a < 3; ++a) {
    s.idx[q] = mid + stride[a];
    s.w[q] = -k[a];
    ++q;
    s.idx[q] = mid - stride[a];
    s.w[q] = -k[a];
    ++q;
  }
}

inline double interp(const double* f, const PointStencil& s) {
  double acc = 0.0;
  for (int q = 0; q < 15; ++q) acc += s.w[q] * f[s.idx[q]];
  return acc;
}

inline void deposit(double* out, const PointStencil& s, double val) {
  for (int q = 0; q < 15; ++q) out[s.idx[q]] += s.w[q] * val;
}

struct PairTable {
  int n;
  std::vector<double> c;    // 2 pi K |u|^{gamma+2}, zero when excluded
  std::vector<double> uu;   // u_hat u_hat^T (6 entries)
  int idx(int dx, int dy, int dz) const {
    const int s = 2 * n - 1;
    return ((dx + n - 1) * s + (dy + n - 1)) * s + (dz + n - 1);
  }
};

inline PairTable pair_table(const VelocityGrid& g, double k_const, double gamma, double eta) {
  PairTable t;
  t.n = g.n();
  const int n = g.n(), s = 2 * n - 1;
  t.c.assign(s * s * s, 0.0);
  t.uu.assign(6 * s * s * s, 0.0);
  for (int dx = -(n - 1); dx <= n - 1; ++dx)
    for (int dy = -(n - 1); dy <= n - 1; ++dy)
      for (int dz = -(n - 1); dz <= n - 1; ++dz) {
        if (dx == 0 && dy == 0 && dz == 0) continue;
        const Vec3 u(dx * g.h(), dy * g.h(), dz * g.h());
        const double r = u.norm();
        if (r < eta) continue;
        const int k = t.idx(dx, dy, dz);
        t.c[k] = 2.0 * std::numbers::pi * k_const * std::pow(r, gamma + 2.0);
        const Vec3 uh = u / r;
        double* q = &t.uu[6 * k];
        q[0] = uh[0] * uh[0];
        q[1] = uh[1] * uh[1];
        q[2] = uh[2] * uh[2];
        q[3] = uh[0] * uh[1];
        q[4] = uh[1] * uh[2];
        q[5] = uh[0] * uh[2];
      }
  return t;
}

// a(u) x for the tabulated pair.
inline void apply_pair(const PairTable& t, int k, const double* x, double* y) {
  const double c = t.c[k];
  const double* q = &t.uu[6 * k];
  const double px = q[0] * x[0] + q[3] * x[1] + q[5] * x[2];
  const double py = q[3] * x[0] + q[1] * x[1] + q[4] * x[2];
  const double pz = q[5] * x[0] + q[4] * x[1] + q[2] * x[2];
  y[0] = c * (x[0] - px);
  y[1] = c * (x[1] - py);
  y[2] = c * (x[2] - pz);
}


Vector landau_core(const VelocityGrid& grid, const Vector& ghat, const Vector& hhat,
                   double k_const, double gamma, double eta, int threads);

}  // namespace grazing::detail
