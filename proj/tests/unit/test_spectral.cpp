#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "grazing/spectral.hpp"
#include "unit/oracles.hpp"

using namespace grazing;

namespace {

KernelParams eps(double e) {
  KernelParams p;
  p.epsilon = e;
  return p;
}

DistributionField with_smu(const VelocityGrid& g, const std::function<double(const Vec3&)>& f) {
  return sample(g, [&](const Vec3& v) { return f(v) * std::sqrt(maxwellian_value(v)); });
}

// One Boltzmann and one Landau matrix at n=8, shared by the cases below.
struct Fixture {
  VelocityGrid g{6.0, 8};
  LinearOperatorMatrix boltz = assemble_linearized(CollisionModel::boltzmann(eps(1e-3)), g);
  LinearOperatorMatrix landau = assemble_linearized(CollisionModel::landau(eps(1e-3)), g);
  ProjectionBasis basis = build_projection_basis(g);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

}  // namespace

TEST_CASE("projection basis and macro state") {
  const VelocityGrid g(6.0, 16);
  const ProjectionBasis B = build_projection_basis(g);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      CHECK(std::abs(B.e[i].dot(B.e[j]) * g.weight() - (i == j)) < 1e-12);

  const Projection p1 = project_null(B, with_smu(g, [](const Vec3&) { return 1.0; }));
  CHECK(std::abs(p1.macro.a - 1) < 1e-12);
  CHECK(p1.macro.b.norm() < 1e-12);
  CHECK(std::abs(p1.macro.c) < 1e-12);

  const DistributionField f2 = with_smu(g, [](const Vec3& v) { return v[0]; });
  const Projection p2 = project_null(B, f2);
  CHECK((p2.field.values - f2.values).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((p2.macro.b - Vec3(1, 0, 0)).norm() < 1e-12);

  // v1^2 projects onto |v|^2/3 by the cubic symmetry of the lattice
  const DistributionField f3 = with_smu(g, [](const Vec3& v) { return v[0] * v[0]; });
  const Projection p3 = project_null(B, f3);
  CHECK(std::abs(p3.macro.a) < 1e-12);
  CHECK(p3.macro.b.norm() < 1e-12);
  CHECK(std::abs(p3.macro.c - 1.0 / 3.0) < 1e-12);
  const DistributionField expect = with_smu(g, [](const Vec3& v) { return v.squaredNorm() / 3; });
  CHECK((p3.field.values - expect.values).cwiseAbs().maxCoeff() < 1e-12);

  std::mt19937_64 rng(8);
  std::normal_distribution<double> N;
  DistributionField r(g);
  for (int k = 0; k < g.size(); ++k) r[k] = N(rng);
  const Projection pr = project_null(B, r);
  const Projection prr = project_null(B, pr.field);
  CHECK((prr.field.values - pr.field.values).cwiseAbs().maxCoeff() < 1e-12);
  const DistributionField micro(g, r.values - pr.field.values);
  for (int i = 0; i < 5; ++i) CHECK(std::abs(micro.values.dot(B.e[i])) * g.weight() < 1e-12);
  CHECK_THROWS_AS(project_null(build_projection_basis(VelocityGrid(6.0, 8)), r), GridMismatch);
}

TEST_CASE("gram matrix against gaussian moments") {
  const VelocityGrid g(8.0, 24);
  const Matrix A = gram_matrix(build_thirteen_moment_basis(g));
  const auto poly = oracle::thirteen_polynomials();
  for (int i = 0; i < 13; ++i)
    for (int j = 0; j < 13; ++j) CHECK(std::abs(A(i, j) - oracle::gram_entry(poly[i], poly[j])) < 1e-4);
  CHECK(A(0, 0) == doctest::Approx(1).epsilon(1e-4));
  CHECK(A(4, 4) == doctest::Approx(3).epsilon(1e-4));
  CHECK(A(1, 10) == doctest::Approx(5).epsilon(1e-4));
  CHECK(A(10, 10) == doctest::Approx(35).epsilon(1e-4));
  CHECK((A - A.transpose()).norm() == 0.0);
  CHECK(eigenvalues(A).minCoeff() > 0.0);
  CHECK(oracle::gaussian_moment(4, 2, 0) == 3.0);
  CHECK(oracle::gaussian_moment(6, 0, 0) == 15.0);
  CHECK(oracle::gaussian_moment(1, 2, 2) == 0.0);
}

TEST_CASE("assembled matrix matches the applied operator") {
  const Fixture& F = fixture();
  for (const auto& [mat, model] : {std::pair{&F.boltz, CollisionModel::boltzmann(eps(1e-3))},
                                   std::pair{&F.landau, CollisionModel::landau(eps(1e-3))}}) {
    const Matrix& M = mat->M;
    CHECK((M - M.transpose()).norm() < 1e-12 * M.norm());
    CHECK(mat->asymmetry < 1e-10);
    const std::vector<int> cols = {0, 77, 200, 311, 511};
    const Matrix C = assemble_columns(model, F.g, cols);
    for (std::size_t c = 0; c < cols.size(); ++c)
      CHECK((C.col(c) - M.col(cols[c])).norm() < 1e-10 * M.norm());
    std::mt19937_64 rng(12);
    std::normal_distribution<double> N;
    DistributionField r(F.g);
    for (int k = 0; k < F.g.size(); ++k) r[k] = N(rng);
    const Vector direct = linearized_apply(model, r).values;
    CHECK((M * r.values - direct).norm() < 1e-10 * direct.norm());
  }
}

TEST_CASE("null space and spectrum floor") {
  const Fixture& F = fixture();
  for (const LinearOperatorMatrix* mat : {&F.boltz, &F.landau}) {
    const double norm = operator_norm(mat->M);
    for (int i = 0; i < 5; ++i) CHECK((mat->M * F.basis.e[i]).norm() / norm < 1e-4);
    const Vector ev = eigenvalues(mat->M);
    // the coarse lattice has tail modes near 4e-5 |L| for Landau; null modes sit at rounding level
    int near_zero = 0;
    for (int k = 0; k < ev.size(); ++k) near_zero += std::abs(ev[k]) <= 1e-8 * norm;
    CHECK(near_zero == 5);
    Vector sorted = ev;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[5] > 1e-5 * norm);
    CHECK(ev.minCoeff() >= -1e-6 * norm);
  }
}

TEST_CASE("family pieces reproduce direct assembly") {
  const Fixture& F = fixture();
  const LinearizedFamily fam(F.g, -3.0, 0.0, AngularRule{});
  CHECK((fam.boltzmann(1e-3).M - F.boltz.M).norm() < 1e-10 * F.boltz.M.norm());
  CHECK((fam.landau(1.0).M - F.landau.M).norm() < 1e-10 * F.landau.M.norm());
  const LinearOperatorMatrix m5 = fam.boltzmann(1e-5);
  const LinearOperatorMatrix direct = assemble_linearized(CollisionModel::boltzmann(eps(1e-5)), F.g);
  CHECK((m5.M - direct.M).norm() < 1e-10 * direct.M.norm());
}

TEST_CASE("spectral gap") {
  const Fixture& F = fixture();
  for (const LinearOperatorMatrix* mat : {&F.boltz, &F.landau}) {
    const double gap = spectral_gap(*mat, F.basis, -3.0);
    CHECK(gap > 0.0);
    // generalized eigenproblem on the complement of the null basis
    const int N = F.g.size();
    Matrix E(N, 5);
    for (int i = 0; i < 5; ++i) E.col(i) = F.basis.e[i];
    const Matrix Q = Eigen::HouseholderQR<Matrix>(E).householderQ();
    const Matrix Z = Q.rightCols(N - 5);
    Vector om(N);
    for (int k = 0; k < N; ++k) om[k] = polynomial_weight(-3.0, F.g.node(k));
    const Matrix A = Z.transpose() * mat->M * Z;
    const Matrix B = Z.transpose() * om.asDiagonal() * Z;
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(0.5 * (A + A.transpose()), B);
    CHECK(gap == doctest::Approx(ges.eigenvalues().minCoeff()).epsilon(1e-8));
  }
  CHECK_THROWS_AS(spectral_gap(F.boltz, build_projection_basis(VelocityGrid(6.0, 10)), -3.0), GridMismatch);
}

TEST_CASE("coercivity probes") {
  const Fixture& F = fixture();
  const auto fam = coercivity_family(F.g, 7, 4, 2);
  CHECK(fam.size() == 1 + 3 + 6 + 4u);
  const auto again = coercivity_family(F.g, 7, 4, 2);
  CHECK(fam.back().values == again.back().values);
  const SphericalHarmonicPlan plan(6.0, 8, 4);
  const CoercivityReport rep = coercivity_constant(F.boltz, eps(1e-3), -1.5, plan, fam);
  CHECK(rep.nu0 > 0.0);
  CHECK(rep.ratios.size() == fam.size());
  CHECK(rep.nu0 == *std::min_element(rep.ratios.begin(), rep.ratios.end()));
  CHECK(rep.ratios[rep.argmin] == rep.nu0);
}

TEST_CASE("matrix and spectrum io") {
  const Matrix M = Matrix::Random(7, 7);
  const auto dir = std::filesystem::temp_directory_path();
  const std::string path = (dir / "grazing_unit_matrix.bin").string();
  write_matrix_binary(M, path);
  CHECK(read_matrix_binary(path) == M);
  CHECK(std::filesystem::file_size(path) == 4 + 4 + 8 + 49 * 8u);
  const std::string csv = (dir / "grazing_unit_spectrum.csv").string();
  write_spectrum_csv(eigenvalues(M + M.transpose()), csv);
  std::ifstream is(csv);
  int lines = 0;
  for (std::string line; std::getline(is, line);) ++lines;
  CHECK(lines == 8);
  std::filesystem::remove(path);
  std::filesystem::remove(csv);
}

TEST_CASE("assembly resource cap") {
  CHECK_THROWS_AS(assemble_linearized(CollisionModel::landau(eps(1e-2)), VelocityGrid(6.0, 26)), ResourceGuard);
}
