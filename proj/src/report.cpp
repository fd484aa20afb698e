#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grazing/experiments.hpp"
#include "json.hpp"

namespace grazing {

namespace {

std::string cell(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

nlohmann::ordered_json finite_or_null(double x) {
  if (std::isfinite(x)) return x;
  return nullptr;
}

}  // namespace

std::string report_csv(const ExperimentReport& r) {
  std::ostringstream os;
  for (std::size_t c = 0; c < r.columns.size(); ++c) os << (c ? "," : "") << r.columns[c];
  os << "\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << cell(row[c]);
    os << "\n";
  }
  return os.str();
}

std::string report_json(const ExperimentReport& r) {
  nlohmann::ordered_json j;
  j["experiment"] = r.id;
  j["schema_version"] = 1;
  j["passed"] = r.passed();
  nlohmann::ordered_json sweep = nlohmann::ordered_json::array();
  for (double e : r.sweep) sweep.push_back(e);
  j["sweep"] = sweep;
  if (r.fit) {
    j["fit"] = {{"slope", r.fit->slope},
                {"intercept", r.fit->intercept},
                {"r2", r.fit->r2},
                {"residual_rms", r.fit->residual},
                {"points", r.fit->points},
                {"valid", r.fit->valid}};
  } else {
    j["fit"] = nullptr;
  }
  nlohmann::ordered_json gates = nlohmann::ordered_json::array();
  for (const Gate& g : r.gates)
    gates.push_back({{"metric", g.metric},
                     {"value", finite_or_null(g.value)},
                     {"lo", finite_or_null(g.lo)},
                     {"hi", finite_or_null(g.hi)},
                     {"passed", g.passed}});
  j["gates"] = gates;
  nlohmann::ordered_json fp = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.fingerprint) fp[k] = v;
  j["environment"] = fp;
  j["flags"] = r.flags;
  j["notes"] = r.notes;
  j["columns"] = r.columns;
  return j.dump(2) + "\n";
}

std::pair<std::string, std::string> emit_report(const ExperimentReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw std::runtime_error("output directory not usable: " + dir);
  const std::string csv = (fs::path(dir) / (r.id + ".csv")).string();
  const std::string js = (fs::path(dir) / (r.id + ".summary.json")).string();
  for (const auto& [path, text] : {std::pair{csv, report_csv(r)}, std::pair{js, report_json(r)}}) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path);
  }
  return {csv, js};
}

}  // namespace grazing
