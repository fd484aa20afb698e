#include "grazing/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace grazing {

namespace {

Vector sqrt_mu(const VelocityGrid& g) { return maxwellian(g).values.cwiseSqrt(); }

double dot_w(const VelocityGrid& g, const Vector& a, const Vector& b) { return a.dot(b) * g.weight(); }

}  // namespace

ProjectionBasis build_projection_basis(const VelocityGrid& g) {
  ProjectionBasis B;
  B.grid = g;
  const Vector smu = sqrt_mu(g);
  for (auto& v : B.raw) v.resize(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    B.raw[0][k] = smu[k];
    B.raw[1][k] = v[0] * smu[k];
    B.raw[2][k] = v[1] * smu[k];
    B.raw[3][k] = v[2] * smu[k];
    B.raw[4][k] = (v.squaredNorm() - 3.0) / std::sqrt(6.0) * smu[k];
  }
  // modified Gram-Schmidt, applied twice
  for (int i = 0; i < 5; ++i) {
    Vector x = B.raw[i];
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < i; ++j) x -= dot_w(g, B.e[j], x) * B.e[j];
    B.e[i] = x / std::sqrt(dot_w(g, x, x));
  }
  return B;
}

Projection project_null(const ProjectionBasis& basis, const DistributionField& f) {
  if (basis.grid != f.grid) throw GridMismatch("project_null: grid mismatch");
  const VelocityGrid& g = f.grid;
  Vector pf = Vector::Zero(g.size());
  for (int i = 0; i < 5; ++i) pf += dot_w(g, basis.e[i], f.values) * basis.e[i];
  // express Pf in sqrt(mu){1, v, |v|^2}
  const Vector smu = basis.raw[0];
  std::array<Vector, 5> mono;
  mono[0] = smu;
  mono[1] = basis.raw[1];
  mono[2] = basis.raw[2];
  mono[3] = basis.raw[3];
  mono[4] = basis.raw[4] * std::sqrt(6.0) + 3.0 * smu;
  Eigen::Matrix<double, 5, 5> G;
  Eigen::Matrix<double, 5, 1> rhs;
  for (int i = 0; i < 5; ++i) {
    rhs[i] = dot_w(g, mono[i], pf);
    for (int j = 0; j < 5; ++j) G(i, j) = dot_w(g, mono[i], mono[j]);
  }
  const Eigen::Matrix<double, 5, 1> x = G.ldlt().solve(rhs);
  Projection out{DistributionField(g, pf, FieldRole::perturbation), {}};
  out.macro.a = x[0];
  out.macro.b = Vec3(x[1], x[2], x[3]);
  out.macro.c = x[4];
  return out;
}

ThirteenMomentBasis build_thirteen_moment_basis(const VelocityGrid& g) {
  ThirteenMomentBasis B;
  B.grid = g;
  const Vector smu = sqrt_mu(g);
  for (auto& v : B.e) v.resize(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 v = g.node(k);
    const double s = smu[k], r2 = v.squaredNorm();
    B.e[0][k] = s;
    for (int a = 0; a < 3; ++a) {
      B.e[1 + a][k] = v[a] * s;
      B.e[4 + a][k] = v[a] * v[a] * s;
      B.e[10 + a][k] = r2 * v[a] * s;
    }
    B.e[7][k] = v[0] * v[1] * s;
    B.e[8][k] = v[1] * v[2] * s;
    B.e[9][k] = v[2] * v[0] * s;
  }
  return B;
}

Matrix gram_matrix(const ThirteenMomentBasis& b) {
  Matrix A(13, 13);
  for (int i = 0; i < 13; ++i)
    for (int j = 0; j < 13; ++j) A(i, j) = dot_w(b.grid, b.e[i], b.e[j]);
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw std::runtime_error("gram_matrix: A is singular at this resolution");
  return A;
}

Vector eigenvalues(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double operator_norm(const Matrix& M) { return eigenvalues(M).cwiseAbs().maxCoeff(); }

double spectral_gap(const LinearOperatorMatrix& M, const ProjectionBasis& basis, double gamma) {
  if (M.grid != basis.grid) throw GridMismatch("spectral_gap: grid mismatch");
  const VelocityGrid& g = M.grid;
  const int N = g.size();
  Vector isw(N);  // Omega^{-1/2}, Omega = <v>^gamma
  for (int k = 0; k < N; ++k) isw[k] = 1.0 / std::sqrt(polynomial_weight(gamma, g.node(k)));
  Matrix A = isw.asDiagonal() * M.M * isw.asDiagonal();
  Matrix E(N, 5);
  for (int i = 0; i < 5; ++i) E.col(i) = isw.cwiseProduct(basis.e[i]);
  Eigen::HouseholderQR<Matrix> qr(E);
  A.applyOnTheLeft(qr.householderQ().adjoint());
  A.applyOnTheRight(qr.householderQ());
  Matrix B = A.bottomRightCorner(N - 5, N - 5);
  B = 0.5 * (B + B.transpose()).eval();
  A.resize(0, 0);
  return eigenvalues(B).minCoeff();
}

std::vector<DistributionField> coercivity_family(const VelocityGrid& g, std::uint64_t seed,
                                                 int n_random, int max_degree) {
  std::vector<DistributionField> fam;
  const Vector smu = sqrt_mu(g);
  auto hermite = [](int k, double x) {  // probabilists' He_k
    double h0 = 1.0, h1 = x;
    if (k == 0) return h0;
    for (int i = 1; i < k; ++i) {
      const double h2 = x * h1 - i * h0;
      h0 = h1;
      h1 = h2;
    }
    return h1;
  };
  for (int deg = 0; deg <= max_degree; ++deg)
    for (int a = deg; a >= 0; --a)
      for (int b = deg - a; b >= 0; --b) {
        const int c = deg - a - b;
        DistributionField f(g);
        for (int k = 0; k < g.size(); ++k) {
          const Vec3 v = g.node(k);
          f.values[k] = hermite(a, v[0]) * hermite(b, v[1]) * hermite(c, v[2]) * smu[k];
        }
        fam.push_back(std::move(f));
      }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int r = 0; r < n_random; ++r) {
    struct Bump { Vec3 c; double s, a; };
    std::vector<Bump> bumps;
    for (int q = 0; q < 4; ++q) {
      Bump bp;
      bp.c = Vec3(1.5 * U(rng), 1.5 * U(rng), 1.5 * U(rng));
      bp.s = 1.1 + 0.4 * U(rng);
      bp.a = U(rng);
      bumps.push_back(bp);
    }
    DistributionField f(g);
    for (int k = 0; k < g.size(); ++k) {
      const Vec3 v = g.node(k);
      double acc = 0.0;
      for (const auto& bp : bumps) acc += bp.a * std::exp(-0.5 * (v - bp.c).squaredNorm() / (bp.s * bp.s));
      f.values[k] = acc;
    }
    fam.push_back(std::move(f));
  }
  return fam;
}

CoercivityReport coercivity_constant(const LinearOperatorMatrix& M, const KernelParams& p, double l,
                                     const SphericalHarmonicPlan& plan,
                                     const std::vector<DistributionField>& family) {
  CoercivityReport rep;
  rep.nu0 = std::numeric_limits<double>::infinity();
  for (std::size_t q = 0; q < family.size(); ++q) {
    const DistributionField& f = family[q];
    if (f.grid != M.grid) throw GridMismatch("coercivity: grid mismatch");
    const double form = f.values.dot(M.M * f.values) * f.grid.weight();
    const double low = std::pow(weighted_l2_norm(f, l), 2);
    const double tn = triple_norm(f, p, l, plan);
    const double ratio = (form + low) / (tn * tn);
    rep.ratios.push_back(ratio);
    if (ratio < rep.nu0) {
      rep.nu0 = ratio;
      rep.argmin = static_cast<int>(q);
    }
  }
  return rep;
}

void write_matrix_binary(const Matrix& M, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write("GZMX", 4);
  const std::uint32_t version = 1;
  const std::uint64_t dim = static_cast<std::uint64_t>(M.rows());
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&dim), 8);
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!os) throw std::runtime_error("write failed: " + path);
}

Matrix read_matrix_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t dim = 0;
  is.read(magic, 4);
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&dim), 8);
  if (!is || std::memcmp(magic, "GZMX", 4) != 0 || version != 1) throw std::runtime_error("bad matrix header");
  Matrix M(dim, dim);
  for (std::uint64_t i = 0; i < dim; ++i)
    for (std::uint64_t j = 0; j < dim; ++j) is.read(reinterpret_cast<char*>(&M(i, j)), 8);
  if (!is) throw std::runtime_error("matrix file truncated");
  return M;
}

void write_spectrum_csv(const Vector& ev, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  os << "index,eigenvalue\n";
  for (int i = 0; i < ev.size(); ++i) os << i << ',' << ev[i] << '\n';
}

}  // namespace grazing
