#include "grazing/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

namespace grazing {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& text, const std::string& name) {
  const std::string s = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("invalid value for " + name + ": '" + text + "' (expected a real number)");
  return v;
}

long long parse_int(const std::string& text, const std::string& name) {
  const std::string s = trim(text);
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("invalid value for " + name + ": '" + text + "' (expected an integer)");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& name) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(item, name));
  if (out.empty()) throw ConfigError("invalid value for " + name + ": empty list");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct KeySpec {
  const char* key;
  const char* flag;
  const char* help;
};

// Every configurable key with its command-line flag.
const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"run.seed", "--seed", "seed for probe fields and initial data"},
      {"run.out", "--out", "output directory (env GRAZING_OUT)"},
      {"run.threads", "--threads", "thread budget (env GRAZING_THREADS)"},
      {"kernel.epsilon", "--epsilon", "comma-separated epsilon sweep"},
      {"kernel.gamma", "--gamma", "kinetic exponent"},
      {"kernel.eta", "--eta", "relative-velocity cutoff"},
      {"grid.box_l", "--box-l", "half-width L of the velocity box"},
      {"grid.n", "--grid-n", "nodes per axis (0: command default)"},
      {"quadrature.n_t", "--n-t", "Gauss nodes in ln sin(theta/2) on the large-angle band"},
      {"quadrature.n_phi", "--n-phi", "azimuth nodes on the large-angle band"},
      {"quadrature.split", "--split", "grazing/large-angle split in sin(theta/2)"},
      {"landau_limit.mode", "--mode", "operator | semigroup"},
      {"landau_limit.time", "--time", "semigroup time"},
      {"landau_limit.slope_min", "--slope-min", "lower slope gate (0: mode default)"},
      {"landau_limit.slope_max", "--slope-max", "upper slope gate (0: mode default)"},
      {"cancellation.delta", "--delta", "cancellation scale delta in (0, 1]"},
      {"evolve.dt", "--dt", "time step"},
      {"evolve.t_end", "--t-end", "final time"},
      {"evolve.scheme", "--scheme", "exponential | rk4"},
      {"evolve.model", "--model", "boltzmann | landau"},
      {"evolve.amplitude", "--amplitude", "L2 norm of the initial perturbation"},
  };
  return specs;
}

std::string key_value(const RunConfig& c, const std::string& key) {
  if (key == "run.seed") return std::to_string(c.seed);
  if (key == "run.out") return c.out;
  if (key == "run.threads") return std::to_string(c.threads);
  if (key == "kernel.epsilon") {
    std::string s;
    for (std::size_t i = 0; i < c.epsilon.size(); ++i) s += (i ? "," : "") + fmt(c.epsilon[i]);
    return s;
  }
  if (key == "kernel.gamma") return fmt(c.gamma);
  if (key == "kernel.eta") return fmt(c.eta);
  if (key == "grid.box_l") return fmt(c.box_l);
  if (key == "grid.n") return std::to_string(c.grid_n);
  if (key == "quadrature.n_t") return std::to_string(c.rule.n_t);
  if (key == "quadrature.n_phi") return std::to_string(c.rule.n_phi);
  if (key == "quadrature.split") return fmt(c.rule.split);
  if (key == "landau_limit.mode") return c.mode;
  if (key == "landau_limit.time") return fmt(c.time);
  if (key == "landau_limit.slope_min") return fmt(c.slope_min);
  if (key == "landau_limit.slope_max") return fmt(c.slope_max);
  if (key == "cancellation.delta") return fmt(c.delta);
  if (key == "evolve.dt") return fmt(c.dt);
  if (key == "evolve.t_end") return fmt(c.t_end);
  if (key == "evolve.scheme") return c.scheme;
  if (key == "evolve.model") return c.model;
  if (key == "evolve.amplitude") return fmt(c.amplitude);
  throw ConfigError("unknown key: " + key);
}

int checked_int(const std::string& v, const std::string& name, long long lo, long long hi) {
  const long long x = parse_int(v, name);
  if (x < lo || x > hi) throw ConfigError("invalid value for " + name + ": out of range");
  return static_cast<int>(x);
}

}  // namespace

void set_config_key(RunConfig& c, const std::string& key, const std::string& v, const std::string& name) {
  if (key == "run.seed") {
    const long long s = parse_int(v, name);
    if (s < 0) throw ConfigError("invalid value for " + name + ": seed must be >= 0");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "run.out") {
    if (trim(v).empty()) throw ConfigError("invalid value for " + name + ": empty path");
    c.out = trim(v);
  } else if (key == "run.threads") {
    c.threads = checked_int(v, name, 1, 1024);
  } else if (key == "kernel.epsilon") {
    c.epsilon = parse_list(v, name);
  } else if (key == "kernel.gamma") {
    c.gamma = parse_real(v, name);
  } else if (key == "kernel.eta") {
    c.eta = parse_real(v, name);
  } else if (key == "grid.box_l") {
    c.box_l = parse_real(v, name);
  } else if (key == "grid.n") {
    c.grid_n = checked_int(v, name, 0, 1024);
  } else if (key == "quadrature.n_t") {
    c.rule.n_t = checked_int(v, name, 1, 1000);
  } else if (key == "quadrature.n_phi") {
    c.rule.n_phi = checked_int(v, name, 2, 1000);
  } else if (key == "quadrature.split") {
    c.rule.split = parse_real(v, name);
  } else if (key == "landau_limit.mode") {
    c.mode = trim(v);
  } else if (key == "landau_limit.time") {
    c.time = parse_real(v, name);
  } else if (key == "landau_limit.slope_min") {
    c.slope_min = parse_real(v, name);
  } else if (key == "landau_limit.slope_max") {
    c.slope_max = parse_real(v, name);
  } else if (key == "cancellation.delta") {
    c.delta = parse_real(v, name);
  } else if (key == "evolve.dt") {
    c.dt = parse_real(v, name);
  } else if (key == "evolve.t_end") {
    c.t_end = parse_real(v, name);
  } else if (key == "evolve.scheme") {
    c.scheme = trim(v);
  } else if (key == "evolve.model") {
    c.model = trim(v);
  } else if (key == "evolve.amplitude") {
    c.amplitude = parse_real(v, name);
  } else {
    throw ConfigError("unknown key: " + name);
  }
}

void RunConfig::validate() const {
  if (std::find(command_names().begin(), command_names().end(), command) == command_names().end())
    throw ConfigError("unknown command: '" + command + "'");
  for (double e : epsilon)
    if (!(e > 0.0 && e < kSqrtHalf)) throw ConfigError("invalid value for --epsilon: each value must lie in (0, sqrt(1/2))");
  if (!(box_l > 0.0)) throw ConfigError("invalid value for --box-l: must be positive");
  if (grid_n != 0 && (grid_n < 8 || grid_n > 64 || grid_n % 2))
    throw ConfigError("invalid value for --grid-n: must be even and in [8, 64]");
  if (eta < 0.0) throw ConfigError("invalid value for --eta: must be >= 0");
  if (rule.n_phi % 2) throw ConfigError("invalid value for --n-phi: must be even");
  if (!(rule.split > 0.0 && rule.split < kSqrtHalf))
    throw ConfigError("invalid value for --split: must lie in (0, sqrt(1/2))");
  if (mode != "operator" && mode != "semigroup")
    throw ConfigError("invalid value for --mode: expected operator or semigroup");
  if (!(time >= 0.0)) throw ConfigError("invalid value for --time: must be >= 0");
  if (slope_min > slope_max) throw ConfigError("invalid value for --slope-min: exceeds --slope-max");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("invalid value for --delta: must lie in (0, 1]");
  if (!(dt > 0.0)) throw ConfigError("invalid value for --dt: must be positive");
  if (!(t_end >= 0.0)) throw ConfigError("invalid value for --t-end: must be >= 0");
  if (scheme != "exponential" && scheme != "rk4") throw ConfigError("invalid value for --scheme: expected exponential or rk4");
  if (model != "boltzmann" && model != "landau") throw ConfigError("invalid value for --model: expected boltzmann or landau");
  if (!(amplitude >= 0.0)) throw ConfigError("invalid value for --amplitude: must be >= 0");
}

std::vector<double> RunConfig::sweep() const {
  if (!epsilon.empty()) return epsilon;
  if (command == "moments") return {1e-2, 1e-4, 1e-6};
  if (command == "invariants" || command == "evolve") return {1e-2};
  if (command == "spectrum" || command == "coercivity") return {1e-2, 1e-3, 1e-4, 1e-5};
  return {1e-2, 1e-4, 1e-6, 1e-8};
}

int RunConfig::resolved_grid_n() const {
  if (grid_n) return grid_n;
  if (command == "invariants") return 16;
  if (command == "evolve") return 8;
  return 12;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      std::replace(section.begin(), section.end(), '-', '_');
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty() && key == "command") {
      cfg.command = value;
      continue;
    }
    if (section.empty()) throw ConfigError(where + ": key '" + key + "' outside a section");
    set_config_key(cfg, section + "." + key, value, where + " " + section + "." + key);
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  apply_config_text(cfg, ss.str(), path);
}

void apply_environment(RunConfig& cfg) {
  if (const char* o = std::getenv("GRAZING_OUT"); o && *o) set_config_key(cfg, "run.out", o, "GRAZING_OUT");
  if (const char* t = std::getenv("GRAZING_THREADS"); t && *t)
    set_config_key(cfg, "run.threads", t, "GRAZING_THREADS");
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream os;
  os << "command = " << cfg.command << "\n";
  std::string section;
  for (const KeySpec& k : key_specs()) {
    const std::string full = k.key;
    const auto dot = full.find('.');
    const std::string sec = full.substr(0, dot);
    if (full == "kernel.epsilon" && cfg.epsilon.empty()) continue;
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << full.substr(dot + 1) << " = " << key_value(cfg, full) << "\n";
  }
  return os.str();
}

CliOutcome parse_cli(int argc, const char* const* argv) {
  CliOutcome out;
  const RunConfig defaults;
  CLI::App app{"Grazing-limit collision operator laboratory"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "layered key = value config file");
  std::vector<std::pair<const KeySpec*, std::unique_ptr<std::string>>> bound;
  for (const KeySpec& k : key_specs()) {
    auto holder = std::make_unique<std::string>();
    std::string def = key_value(defaults, k.key);
    if (std::string(k.key) == "kernel.epsilon") def = "per command";
    app.add_option(k.flag, *holder, k.help)->default_str(def);
    bound.emplace_back(&k, std::move(holder));
  }
  std::vector<CLI::App*> subs;
  for (const std::string& name : command_names()) {
    CLI::App* s = app.add_subcommand(name, "run the " + name + " experiment");
    s->fallthrough();
    subs.push_back(s);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out.exit_code = app.exit(e);
    return out;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cout << "status=error command=none reason=usage\n";
    out.exit_code = 1;
    return out;
  }
  RunConfig cfg;
  for (CLI::App* s : subs)
    if (s->parsed()) cfg.command = s->get_name();
  try {
    if (!config_path.empty()) {
      const std::string cmd = cfg.command;
      apply_config_file(cfg, config_path);
      if (cfg.command != cmd) throw ConfigError("config file command '" + cfg.command + "' does not match '" + cmd + "'");
    }
    apply_environment(cfg);
    for (const auto& [spec, value] : bound)
      if (app.count(spec->flag)) set_config_key(cfg, spec->key, *value, spec->flag);
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << "status=error command=" << cfg.command << " reason=config\n";
    out.exit_code = 1;
    return out;
  }
  out.config = cfg;
  out.run = true;
  return out;
}

ExperimentReport run_command(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<double> eps = cfg.sweep();
  const GridSpec grid{cfg.box_l, cfg.resolved_grid_n()};
  const std::string& c = cfg.command;
  if (c == "moments") return moment_verification_experiment(eps);
  if (c == "cancellation") {
    CancellationConfig cc;
    cc.grid = grid;
    cc.delta = cfg.delta;
    return cancellation_experiment(eps, cc);
  }
  if (c == "invariants") {
    InvariantsConfig ic;
    ic.grid = grid;
    ic.rule = cfg.rule;
    ic.seed = cfg.seed;
    ic.threads = cfg.threads;
    return invariants_experiment(eps, ic);
  }
  if (c == "spectrum" || c == "coercivity") {
    GapSweepConfig gc;
    gc.grid = grid;
    gc.rule = cfg.rule;
    gc.gamma = cfg.gamma;
    gc.seed = cfg.seed;
    gc.gap = c == "spectrum";
    return gap_sweep_experiment(eps, gc);
  }
  if (c == "landau-limit") {
    LandauLimitConfig lc;
    lc.grid = grid;
    lc.rule = cfg.rule;
    lc.seed = cfg.seed;
    lc.t = cfg.time;
    const bool op = cfg.mode == "operator";
    lc.slope_lo = op ? 0.8 : 0.7;
    lc.slope_hi = op ? 1.2 : 1.3;
    if (cfg.slope_min != 0.0 || cfg.slope_max != 0.0) {
      lc.slope_lo = cfg.slope_min;
      lc.slope_hi = cfg.slope_max;
    }
    return landau_limit_experiment(op ? LimitMode::op : LimitMode::semigroup, eps, lc);
  }
  EvolveExperimentConfig ec;
  ec.evolution.dt = cfg.dt;
  ec.evolution.t_end = cfg.t_end;
  ec.evolution.scheme = cfg.scheme == "rk4" ? Scheme::rk4 : Scheme::exponential;
  ec.evolution.params.epsilon = eps.front();
  ec.evolution.params.gamma = cfg.gamma;
  ec.evolution.params.eta = cfg.eta;
  ec.evolution.rule = cfg.rule;
  ec.evolution.landau = cfg.model == "landau";
  ec.evolution.L = grid.L;
  ec.evolution.n = grid.n;
  ec.evolution.threads = cfg.threads;
  ec.seed = cfg.seed;
  ec.amplitude = cfg.amplitude;
  return evolve_experiment(ec);
}

int execute(const RunConfig& cfg) {
  ExperimentReport rep;
  std::pair<std::string, std::string> paths;
  try {
    rep = run_command(cfg);
    paths = emit_report(rep, cfg.out);
    std::ofstream os(cfg.out + "/" + rep.id + ".config", std::ios::binary);
    os << serialize_config(cfg);
    if (!os) throw std::runtime_error("cannot write effective config");
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cout << "status=error command=" << cfg.command << " reason=runtime\n";
    return 1;
  }
  int passed = 0;
  for (const Gate& g : rep.gates) passed += g.passed;
  if (const Gate* f = rep.first_failure()) {
    std::cerr << "gate failed: " << f->metric << " = " << fmt(f->value) << " outside [" << fmt(f->lo) << ", "
              << fmt(f->hi) << "]\n";
    std::cout << "status=fail command=" << cfg.command << " metric=" << f->metric << " value=" << fmt(f->value)
              << " gates=" << passed << "/" << rep.gates.size() << " csv=" << paths.first << "\n";
    return 2;
  }
  std::cout << "status=pass command=" << cfg.command << " gates=" << passed << "/" << rep.gates.size()
            << " csv=" << paths.first << "\n";
  return 0;
}

}  // namespace grazing
