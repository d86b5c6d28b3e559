#pragma once

// Flat key/value configuration files.
//
//   # comment
//   label           = fig1
//   vif_grid        = default | 1, 2, 5 | 1:2:0.1
//   n_grid          = default | 100, 1000
//   structure       = pairwise | equi
//   p               = 6          (also resets betas to the preset for p)
//   betas           = 2, 1.3, 1.5, 6, 3, 1      (beta_main first)
//   beta0           = 10
//   beta_main_sweep = 0:2:0.1    (empty: betas[0] only)
//   sigma_eps       = 1.8137993642342178
//   n_sims          = 1000
//   seed_base       = 0
//   omit            = x4         (comma separated predictor names)
//   c_powval        = 0.189
//
// Lists accept comma-separated values and start:stop:step ranges (inclusive).
// Unknown keys are errors. Keys may appear in any order; p is applied first.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "collinsim/errors.hpp"
#include "collinsim/runner.hpp"

namespace collinsim {

namespace config_detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

inline double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty() || !std::isfinite(out)) throw ConfigError(key + ": not a number: '" + v + "'");
  return out;
}

inline long long to_integer(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw ConfigError(key + ": not an integer: '" + v + "'");
  return out;
}

inline std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& item : split(v, ',')) {
    const auto range = split(item, ':');
    if (range.size() == 1) {
      out.push_back(to_double(key, item));
    } else if (range.size() == 3) {
      const double start = to_double(key, range[0]);
      const double stop = to_double(key, range[1]);
      const double step = to_double(key, range[2]);
      if (!(step > 0.0) || stop < start) throw ConfigError(key + ": bad range '" + item + "'");
      const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
      for (long i = 0; i < count; ++i) out.push_back(std::round((start + i * step) * 1e9) / 1e9);
    } else {
      throw ConfigError(key + ": bad list item '" + item + "'");
    }
  }
  return out;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if constexpr (std::is_floating_point_v<T>) out += format_number(values[i]);
    else out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace config_detail

inline std::vector<int> parse_omit_list(const std::string& value) {
  std::vector<int> out;
  if (config_detail::trim(value).empty()) return out;
  for (const auto& name : config_detail::split(value, ',')) out.push_back(parse_predictor_name(name));
  std::sort(out.begin(), out.end());
  return out;
}

/// Applies `key = value` to g.
inline void apply_config_entry(GridConfig& g, const std::string& key, const std::string& value) {
  using namespace config_detail;
  if (key == "label") {
    g.label = value;
  } else if (key == "vif_grid") {
    g.vif_grid = value == "default" ? default_vif_grid() : to_double_list(key, value);
  } else if (key == "n_grid") {
    if (value == "default") {
      g.n_grid = default_n_grid();
    } else {
      g.n_grid.clear();
      for (double v : to_double_list(key, value)) {
        if (v != std::floor(v)) throw ConfigError("n_grid: not an integer: " + format_number(v));
        g.n_grid.push_back(static_cast<long>(v));
      }
    }
  } else if (key == "structure") {
    g.structure = parse_structure(value);
  } else if (key == "p") {
    g.set_predictor_count(static_cast<int>(to_integer(key, value)));
  } else if (key == "betas") {
    g.betas = to_double_list(key, value);
  } else if (key == "beta0") {
    g.beta0 = to_double(key, value);
  } else if (key == "beta_main_sweep") {
    g.beta_main_sweep = value == "default" ? effect_size_sweep() : to_double_list(key, value);
  } else if (key == "sigma_eps") {
    g.sigma_eps = to_double(key, value);
  } else if (key == "n_sims") {
    g.n_sims = static_cast<int>(to_integer(key, value));
  } else if (key == "seed_base") {
    g.seed_base = to_integer(key, value);
  } else if (key == "omit") {
    g.omit = parse_omit_list(value);
  } else if (key == "c_powval") {
    g.c_powval = to_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

inline GridConfig parse_config_text(const std::string& text, GridConfig g = {}) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = config_detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    entries.emplace_back(config_detail::trim(line.substr(0, eq)), config_detail::trim(line.substr(eq + 1)));
  }
  std::stable_partition(entries.begin(), entries.end(), [](const auto& kv) { return kv.first == "p"; });
  for (const auto& [k, v] : entries) apply_config_entry(g, k, v);
  return g;
}

inline GridConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

/// Canonical text form; parse_config_text(to_config_text(g)) reproduces g.
inline std::string to_config_text(const GridConfig& g) {
  using namespace config_detail;
  std::vector<std::string> omit_names;
  for (int j : g.omit) omit_names.push_back(predictor_name(j));
  std::string omit_text;
  for (std::size_t i = 0; i < omit_names.size(); ++i) omit_text += (i ? ", " : "") + omit_names[i];
  std::ostringstream out;
  out << "label = " << g.label << '\n'
      << "vif_grid = " << join(g.vif_grid) << '\n'
      << "n_grid = " << join(g.n_grid) << '\n'
      << "structure = " << to_string(g.structure) << '\n'
      << "p = " << g.p << '\n'
      << "betas = " << join(g.betas) << '\n'
      << "beta0 = " << format_number(g.beta0) << '\n'
      << "beta_main_sweep = " << join(g.beta_main_sweep) << '\n'
      << "sigma_eps = " << format_number(g.sigma_eps) << '\n'
      << "n_sims = " << g.n_sims << '\n'
      << "seed_base = " << g.seed_base << '\n'
      << "omit = " << omit_text << '\n'
      << "c_powval = " << format_number(g.c_powval) << '\n';
  return out.str();
}

}  // namespace collinsim
