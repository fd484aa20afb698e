#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "grazing/experiments.hpp"

namespace grazing {

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"moments",  "cancellation", "invariants", "spectrum",
                                                 "coercivity", "landau-limit", "evolve"};
  return names;
}

// Effective run settings. Sweep and grid size fall back to per-command
// defaults when left empty / zero.
struct RunConfig {
  std::string command;
  std::vector<double> epsilon;
  double gamma = -3.0;
  double eta = 0.0;
  double box_l = 6.0;
  int grid_n = 0;
  AngularRule rule;
  std::uint64_t seed = 7;
  std::string out = "out";
  int threads = 1;
  // landau-limit
  std::string mode = "operator";
  double time = 1.0;
  double slope_min = 0.0;  // 0 and 0: mode default window
  double slope_max = 0.0;
  // cancellation
  double delta = 0.5;
  // evolve
  double dt = 0.25;
  double t_end = 5.0;
  std::string scheme = "exponential";
  std::string model = "boltzmann";
  double amplitude = 0.05;

  void validate() const;
  std::vector<double> sweep() const;  // epsilon or the command default
  int resolved_grid_n() const;
};

// Sets one key ("section.key") from text; `name` is used in diagnostics.
void set_config_key(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& name);

// Flat "key = value" text with [section] headers; '#' starts a comment.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);
void apply_config_file(RunConfig& cfg, const std::string& path);
// GRAZING_OUT and GRAZING_THREADS.
void apply_environment(RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

struct CliOutcome {
  RunConfig config;
  bool run = false;   // false: exit immediately with exit_code
  int exit_code = 0;
};

// defaults < config file < environment < flags
CliOutcome parse_cli(int argc, const char* const* argv);

ExperimentReport run_command(const RunConfig& cfg);

// Runs, writes the report and the effective config; returns the exit code
// (0 pass, 1 error, 2 failed gate) and prints the one-line status to stdout.
int execute(const RunConfig& cfg);

}  // namespace grazing
