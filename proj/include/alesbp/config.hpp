#pragma once

// Plain-text key=value configuration for ExperimentConfig. Blank lines and
// lines starting with '#' are ignored; later keys override earlier ones.

#include "alesbp/error.hpp"
#include "alesbp/experiment.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace alesbp {

namespace detail {
inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw InvalidArgument("config: '" + key + "' expects a number, got '" + v + "'");
  return d;
}

inline int to_int(const std::string& key, const std::string& v) {
  int i = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), i);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw InvalidArgument("config: '" + key + "' expects an integer, got '" + v + "'");
  return i;
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "on" || v == "true" || v == "1" || v == "yes") return true;
  if (v == "off" || v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument("config: '" + key + "' expects on/off, got '" + v + "'");
}
}  // namespace detail

inline std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(detail::to_int("N", detail::trim(item)));
  return out;
}

/// Applies one key=value pair.
inline void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "epsilon") cfg.epsilon = to_double(key, value);
  else if (key == "amplitude" || key == "A") cfg.amplitude = to_double(key, value);
  else if (key == "N") cfg.N = parse_int_list(value);
  else if (key == "order") cfg.order = parse_order(value);
  else if (key == "t_end") cfg.t_end = to_double(key, value);
  else if (key == "dt_safety") cfg.dt_safety = to_double(key, value);
  else if (key == "case") cfg.mesh_case = parse_case(value);
  else if (key == "jacobian_mode") cfg.jacobian_mode = parse_jacobian_mode(value);
  else if (key == "divergence") {
    if (value == "discrete") cfg.divergence_mode = DivergenceMode::Discrete;
    else if (value == "exact") cfg.divergence_mode = DivergenceMode::Exact;
    else throw InvalidArgument("config: divergence expects discrete or exact");
  } else if (key == "filter") cfg.filter.enabled = to_bool(key, value);
  else if (key == "filter_order") cfg.filter.order = to_int(key, value);
  else if (key == "filter_strength") cfg.filter.strength = to_double(key, value);
  else if (key == "grid_ratio") cfg.grid_ratio = to_double(key, value);
  else if (key == "samples") cfg.samples = to_int(key, value);
  else if (key == "alpha") cfg.alpha = to_double(key, value);
  else if (key == "out") cfg.out = value;
  else throw InvalidArgument("config: unknown key '" + key + "'");
}

inline void read_config(std::istream& in, ExperimentConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(line);
    if (s.empty() || s[0] == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected key=value");
    apply_setting(cfg, detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)));
  }
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  read_config(in, cfg);
  return cfg;
}

}  // namespace alesbp
