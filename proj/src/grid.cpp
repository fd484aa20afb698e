#include "grazing/grid.hpp"

#include "internal.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace grazing {

VelocityGrid::VelocityGrid(double L, int n) : L_(L), n_(n) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("grid: L must be positive");
  if (n < 8 || n > 64 || n % 2 != 0)
    throw std::invalid_argument("grid: n must be even with 8 <= n <= 64");
  h_ = 2.0 * L / n;
}

VelocityGrid build_velocity_grid(double L, int n) { return VelocityGrid(L, n); }

const char* role_name(FieldRole r) {
  switch (r) {
    case FieldRole::density: return "density";
    case FieldRole::perturbation: return "perturbation";
    case FieldRole::basis: return "basis";
    case FieldRole::weight: return "weight";
  }
  return "unknown";
}

DistributionField::DistributionField(const VelocityGrid& g, Vector v, FieldRole r)
    : grid(g), values(std::move(v)), role(r) {
  if (values.size() != g.size()) throw std::invalid_argument("field: length mismatch");
  if (!values.allFinite()) throw std::invalid_argument("field: non-finite values");
}

void require_same_grid(const DistributionField& a, const DistributionField& b) {
  if (a.grid != b.grid) throw GridMismatch("fields live on different grids");
}

DistributionField sample(const VelocityGrid& g, const std::function<double(const Vec3&)>& f,
                         FieldRole role) {
  DistributionField out(g, role);
  for (int k = 0; k < g.size(); ++k) out.values[k] = f(g.node(k));
  return out;
}

double maxwellian_value(const Vec3& v) {
  return std::pow(2.0 * std::numbers::pi, -1.5) * std::exp(-0.5 * v.squaredNorm());
}

DistributionField maxwellian(const VelocityGrid& g) {
  return sample(g, maxwellian_value, FieldRole::density);
}

double inner(const DistributionField& a, const DistributionField& b) {
  require_same_grid(a, b);
  return a.values.dot(b.values) * a.grid.weight();
}

double weighted_l2_norm(const DistributionField& f, double l) {
  double s = 0.0;
  for (int k = 0; k < f.grid.size(); ++k) {
    const double w = polynomial_weight(l, f.grid.node(k));
    s += w * w * f.values[k] * f.values[k];
  }
  return std::sqrt(s * f.grid.weight());
}

double interpolate_corrected(const VelocityGrid& g, const double* values, const Vec3& x) {
  detail::PointStencil s;
  detail::point_stencil(g.lattice_coord(x[0]), g.lattice_coord(x[1]), g.lattice_coord(x[2]), g.n(), s);
  return detail::interp(values, s);
}

double interpolate_trilinear(const VelocityGrid& g, const double* values, const Vec3& x) {
  const int n = g.n();
  int i0[3];
  double fr[3];
  for (int a = 0; a < 3; ++a) {
    const double xi = g.lattice_coord(x[a]);
    if (xi < -1.0 || xi > n) return 0.0;
    i0[a] = static_cast<int>(std::floor(xi));
    fr[a] = xi - i0[a];
  }
  double acc = 0.0;
  for (int a = 0; a < 2; ++a) {
    const int ix = i0[0] + a;
    if (ix < 0 || ix >= n) continue;
    const double wa = a ? fr[0] : 1.0 - fr[0];
    for (int b = 0; b < 2; ++b) {
      const int iy = i0[1] + b;
      if (iy < 0 || iy >= n) continue;
      const double wb = b ? fr[1] : 1.0 - fr[1];
      for (int c = 0; c < 2; ++c) {
        const int iz = i0[2] + c;
        if (iz < 0 || iz >= n) continue;
        const double wc = c ? fr[2] : 1.0 - fr[2];
        acc += wa * wb * wc * values[(ix * n + iy) * n + iz];
      }
    }
  }
  return acc;
}

DistributionField apply_fourier_weight(const DistributionField& f, const KernelParams& p) {
  const VelocityGrid& g = f.grid;
  const int n = g.n(), N = g.size();
  const CharacteristicWeight W(p);
  std::vector<std::complex<double>> buf(N);
  for (int k = 0; k < N; ++k) buf[k] = f.values[k];
  auto* data = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan fwd = fftw_plan_dft_3d(n, n, n, data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_plan bwd = fftw_plan_dft_3d(n, n, n, data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  const double step = std::numbers::pi / g.L();
  std::vector<double> xi(n);
  for (int m = 0; m < n; ++m) xi[m] = step * (m < n / 2 ? m : m - n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const double r = std::sqrt(xi[a] * xi[a] + xi[b] * xi[b] + xi[c] * xi[c]);
        buf[(a * n + b) * n + c] *= W(r) / N;
      }
  fftw_execute(bwd);
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(bwd);
  DistributionField out(g, f.role);
  double imag = 0.0, scale = f.values.cwiseAbs().maxCoeff();
  for (int k = 0; k < N; ++k) {
    out.values[k] = buf[k].real();
    imag = std::max(imag, std::abs(buf[k].imag()));
  }
  if (imag > 1e-10 * std::max(scale, 1e-300) * W.ceiling())
    throw std::runtime_error("apply_fourier_weight: imaginary residue above 1e-10");
  return out;
}

DistributionField apply_phase_weight(const DistributionField& f, const KernelParams& p) {
  const CharacteristicWeight W(p);
  DistributionField out = f;
  for (int k = 0; k < f.grid.size(); ++k) out.values[k] *= W(f.grid.node(k));
  return out;
}

DistributionField apply_polynomial_weight(const DistributionField& f, double l) {
  DistributionField out = f;
  for (int k = 0; k < f.grid.size(); ++k) out.values[k] *= polynomial_weight(l, f.grid.node(k));
  return out;
}

namespace {
template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("field file truncated");
  return v;
}
}  // namespace

void write_field_binary(const DistributionField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.write("GZFD", 4);
  put<std::uint32_t>(os, 1);
  put<double>(os, f.grid.L());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n()));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(f.role));
  os.write(reinterpret_cast<const char*>(f.values.data()),
           static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!os) throw std::runtime_error("write failed: " + path);
}

DistributionField read_field_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GZFD", 4) != 0) throw std::runtime_error("bad field magic");
  if (get<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported field version");
  const double L = get<double>(is);
  const int n = static_cast<int>(get<std::uint32_t>(is));
  const auto role = static_cast<FieldRole>(get<std::uint32_t>(is));
  VelocityGrid g(L, n);
  Vector v(g.size());
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
  if (!is) throw std::runtime_error("field file truncated");
  return DistributionField(g, std::move(v), role);
}

void write_field_csv(const DistributionField& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os.precision(17);
  os << "vx,vy,vz,value\n";
  for (int k = 0; k < f.grid.size(); ++k) {
    const Vec3 v = f.grid.node(k);
    os << v[0] << ',' << v[1] << ',' << v[2] << ',' << f.values[k] << '\n';
  }
}

}  // namespace grazing
