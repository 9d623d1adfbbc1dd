// Run configuration: documented defaults, an optional key=value file and
// command-line overrides (flags win over the file).
#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "igauge/grid.hpp"
#include "igauge/lie.hpp"

namespace igauge {

struct RunConfig {
  int order = 4;              // stencil order, 2 or 4
  std::size_t size = 48;      // points per periodic axis unless overridden below
  std::size_t size_phi = 0;   // 0: use size
  std::size_t size_x = 0;
  std::size_t size_y = 0;
  std::size_t radial = 17;    // points on [r0, R]
  double r0 = 1.0;
  double R = 2.0;
  std::uint64_t seed = 1;
  GroupTag group = GroupTag::SU2;
  int bandlimit = 2;
  double amplitude = 0.3;
  int degree = 1;             // target degree for gen-gauge / gen-flat
  int steps = 200;            // relaxation steps
  double step_size = 0.0;     // 0: automatic
  double degree_tol = 0.1;    // distance to the nearest integer that flags under-resolution
  double rk4_tol = 1e-6;      // largest tolerated reprojection correction in the temporal gauge
  double constancy_tol = 1e-2;  // largest tolerated spread of the holonomy over the surface
  double residue_warn = 1e-3;   // Maurer-Cartan projection residue that triggers a warning

  std::size_t n_phi() const { return size_phi ? size_phi : size; }
  std::size_t n_x() const { return size_x ? size_x : size; }
  std::size_t n_y() const { return size_y ? size_y : size; }
  GridSpec grid3d() const { return grid3(n_phi(), n_x(), n_y()); }
  GridSpec grid4d() const { return grid4(radial, n_phi(), n_x(), n_y(), r0, R); }

  static const std::vector<std::string>& keys();
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  void validate() const;
  void echo(std::ostream& out) const;
};

namespace detail {

template <class T>
T parse_number(const std::string& key, const std::string& s) {
  T v{};
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw usage_error("bad value for " + key + ": '" + s + "'");
  return v;
}

inline std::string format_real(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

inline const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> k{"order",    "size",      "size_phi",   "size_x",        "size_y",
                                          "radial",   "r0",        "R",          "seed",          "group",
                                          "bandlimit", "amplitude", "degree",    "steps",         "step_size",
                                          "degree_tol", "rk4_tol",  "constancy_tol", "residue_warn"};
  return k;
}

inline void RunConfig::set(const std::string& key, const std::string& value) {
  using detail::parse_number;
  const std::string v = detail::trim(value);
  if (key == "order") order = parse_number<int>(key, v);
  else if (key == "size") size = parse_number<std::size_t>(key, v);
  else if (key == "size_phi") size_phi = parse_number<std::size_t>(key, v);
  else if (key == "size_x") size_x = parse_number<std::size_t>(key, v);
  else if (key == "size_y") size_y = parse_number<std::size_t>(key, v);
  else if (key == "radial") radial = parse_number<std::size_t>(key, v);
  else if (key == "r0") r0 = parse_number<double>(key, v);
  else if (key == "R") R = parse_number<double>(key, v);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, v);
  else if (key == "group") group = parse_group(v);
  else if (key == "bandlimit") bandlimit = parse_number<int>(key, v);
  else if (key == "amplitude") amplitude = parse_number<double>(key, v);
  else if (key == "degree") degree = parse_number<int>(key, v);
  else if (key == "steps") steps = parse_number<int>(key, v);
  else if (key == "step_size") step_size = parse_number<double>(key, v);
  else if (key == "degree_tol") degree_tol = parse_number<double>(key, v);
  else if (key == "rk4_tol") rk4_tol = parse_number<double>(key, v);
  else if (key == "constancy_tol") constancy_tol = parse_number<double>(key, v);
  else if (key == "residue_warn") residue_warn = parse_number<double>(key, v);
  else throw usage_error("unknown configuration key '" + key + "'");
}

inline std::string RunConfig::get(const std::string& key) const {
  using detail::format_real;
  if (key == "order") return std::to_string(order);
  if (key == "size") return std::to_string(size);
  if (key == "size_phi") return std::to_string(n_phi());
  if (key == "size_x") return std::to_string(n_x());
  if (key == "size_y") return std::to_string(n_y());
  if (key == "radial") return std::to_string(radial);
  if (key == "r0") return format_real(r0);
  if (key == "R") return format_real(R);
  if (key == "seed") return std::to_string(seed);
  if (key == "group") return to_string(group);
  if (key == "bandlimit") return std::to_string(bandlimit);
  if (key == "amplitude") return format_real(amplitude);
  if (key == "degree") return std::to_string(degree);
  if (key == "steps") return std::to_string(steps);
  if (key == "step_size") return format_real(step_size);
  if (key == "degree_tol") return format_real(degree_tol);
  if (key == "rk4_tol") return format_real(rk4_tol);
  if (key == "constancy_tol") return format_real(constancy_tol);
  if (key == "residue_warn") return format_real(residue_warn);
  throw usage_error("unknown configuration key '" + key + "'");
}

inline void RunConfig::validate() const {
  if (order != 2 && order != 4) throw usage_error("order must be 2 or 4");
  if (n_phi() < 5 || n_x() < 5 || n_y() < 5) throw usage_error("periodic sizes must be at least 5");
  if (radial < 5) throw usage_error("radial size must be at least 5");
  if (!(r0 > 0.0) || !(R > r0)) throw usage_error("need 0 < r0 < R");
  if (bandlimit < 0) throw usage_error("bandlimit must be nonnegative");
  if (steps < 0) throw usage_error("steps must be nonnegative");
  if (step_size < 0.0) throw usage_error("step_size must be nonnegative (0 selects the default)");
  if (!(degree_tol > 0.0 && degree_tol < 0.5)) throw usage_error("degree_tol must lie in (0, 0.5)");
  if (!(rk4_tol > 0.0) || !(constancy_tol > 0.0) || !(residue_warn > 0.0))
    throw usage_error("tolerances must be positive");
}

inline void RunConfig::echo(std::ostream& out) const {
  for (const auto& k : keys()) out << "config." << k << '=' << get(k) << '\n';
}

/// Applies `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Returns the keys that were set.
inline std::vector<std::string> load_config_text(RunConfig& cfg, const std::string& text,
                                                 const std::string& source = "config") {
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw usage_error(source + ":" + std::to_string(lineno) + ": expected key=value");
    seen.push_back(detail::trim(line.substr(0, eq)));
    cfg.set(seen.back(), line.substr(eq + 1));
  }
  return seen;
}

inline std::vector<std::string> load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(cfg, ss.str(), path);
}

}  // namespace igauge
