#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grazing/evolve.hpp"

namespace grazing {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double residual = 0.0;  // root-mean-square residual in log space
  int points = 0;
  bool valid = false;     // r2 >= the configured floor
};

// Ordinary least squares of log y against log x.
FitResult fit_loglog(const std::vector<double>& x, const std::vector<double>& y, double min_r2 = 0.95);

struct Gate {
  std::string metric;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool passed = false;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> sweep;
  std::optional<FitResult> fit;
  std::vector<Gate> gates;
  std::vector<std::pair<std::string, std::string>> fingerprint;
  std::vector<std::string> flags;
  std::vector<std::string> notes;

  // Adds a gate lo <= value <= hi.
  void gate(const std::string& metric, double value, double lo, double hi);
  bool passed() const;
  const Gate* first_failure() const;
};

// CSV (header + one row per sweep point) and JSON summary; both deterministic.
std::string report_csv(const ExperimentReport& r);
std::string report_json(const ExperimentReport& r);
// Writes <dir>/<id>.csv and <dir>/<id>.summary.json. Returns the two paths.
std::pair<std::string, std::string> emit_report(const ExperimentReport& r, const std::string& dir);

struct GridSpec {
  double L = 6.0;
  int n = 12;
};

// sqrt(mu) times a seeded combination of tensor Hermite polynomials of total
// degree <= max_degree. With micro = true the null-space component is removed.
DistributionField hermite_field(const VelocityGrid& g, std::uint64_t seed, int max_degree, bool micro);

ExperimentReport moment_verification_experiment(const std::vector<double>& eps_list, double tol = 1e-10);

struct CancellationConfig {
  GridSpec grid{6.0, 12};
  double delta = 0.5;
  double tol = 1e-3;
  double l1_ratio = 1.1;
  double l1_reference_eps = 1e-8;
  CancellationResolution resolution;
};
ExperimentReport cancellation_experiment(const std::vector<double>& eps_list, const CancellationConfig& cfg);

struct InvariantsConfig {
  GridSpec grid{6.0, 16};
  AngularRule rule;
  std::uint64_t seed = 7;
  double conservation_tol = 1e-6;
  double null_tol = 1e-4;
  bool assemble = true;  // null space and eigenvalue count need the dense matrix
  int threads = 1;
};
ExperimentReport invariants_experiment(const std::vector<double>& eps_list, const InvariantsConfig& cfg);

struct GapSweepConfig {
  GridSpec grid{6.0, 12};
  AngularRule rule;
  double gamma = -3.0;
  double l = -1.5;           // weight of the coercivity norms
  std::uint64_t seed = 7;
  int n_random = 32;
  int max_degree = 6;
  int shells = 16;
  int l_max = 6;
  double max_ratio = 3.0;
  bool gap = true;
  bool coercivity = true;
  bool landau_endpoint = true;
  const LinearizedFamily* family = nullptr;  // reused when given
};
ExperimentReport gap_sweep_experiment(const std::vector<double>& eps_list, const GapSweepConfig& cfg);

enum class LimitMode { op, semigroup };

struct LandauLimitConfig {
  GridSpec grid{6.0, 12};
  AngularRule rule;
  double t = 1.0;
  double weight_l = 0.0;
  std::uint64_t seed = 7;
  int max_degree = 3;
  double slope_lo = 0.8;
  double slope_hi = 1.2;
  double min_r2 = 0.95;
  bool zero_data = false;
  const LinearizedFamily* family = nullptr;
};
ExperimentReport landau_limit_experiment(LimitMode mode, const std::vector<double>& eps_list,
                                         const LandauLimitConfig& cfg);

struct EvolveExperimentConfig {
  EvolutionConfig evolution;
  std::uint64_t seed = 7;
  double amplitude = 0.05;  // ||f0||
  int max_degree = 4;
  double drift_tol = 1e-5;
  double norm_slack = 0.1;
};
ExperimentReport evolve_experiment(const EvolveExperimentConfig& cfg, const LinearOperatorMatrix* M = nullptr);

}  // namespace grazing
