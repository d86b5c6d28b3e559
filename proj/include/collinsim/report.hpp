#pragma once

// Result persistence: results.csv, manifest.json and heatmap_<metric>.csv.
// Reals are written with 6 significant digits ("%.6g"); integers verbatim.
// CSV output is RFC 4180 style with LF line endings.

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "collinsim/errors.hpp"
#include "collinsim/grid.hpp"
#include "collinsim/metrics.hpp"

namespace collinsim {

inline constexpr std::string_view kResultsHeader =
    "n,vif,structure,p,beta_main,d,n_sims,omit,coverage,coverage_mcse,bias,bias_mcse,mae,mae_mcse,"
    "pa,pa_mcse,power,power_mcse,ci_width,ci_width_mcse,se,se_mcse";

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

inline std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string results_row(const ScenarioResult& r) {
  const auto& s = r.scenario;
  std::string row;
  auto put = [&row](const std::string& f) {
    if (!row.empty()) row += ',';
    row += f;
  };
  put(std::to_string(s.n));
  put(format_real(s.vif));
  put(std::string(to_string(s.structure)));
  put(std::to_string(s.p));
  put(format_real(s.beta_main));
  put(format_real(s.cohens_d));
  put(std::to_string(r.n_sims));
  put(csv_field(omit_label(s.omit)));
  for (const Estimate* e : {&r.coverage, &r.bias, &r.mae, &r.precision_assurance, &r.power_traditional,
                            &r.mean_ci_width, &r.mean_se}) {
    put(format_real(e->value));
    put(format_real(e->mc_se));
  }
  return row;
}

inline std::string results_csv_text(const std::vector<ScenarioResult>& results) {
  std::string out(kResultsHeader);
  out += '\n';
  for (const auto& r : results) out += results_row(r) + '\n';
  return out;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_results_csv(const std::vector<ScenarioResult>& results, const std::filesystem::path& path) {
  if (results.empty()) throw std::invalid_argument("no results to write");
  write_text_file(path, results_csv_text(results));
}

inline std::vector<ScenarioResult> parse_results_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kResultsHeader) throw IoError("results CSV header mismatch");
  std::vector<ScenarioResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = parse_csv_line(line);
    if (f.size() != 22) throw IoError("results CSV row has " + std::to_string(f.size()) + " fields, expected 22");
    ScenarioResult r;
    auto& s = r.scenario;
    s.n = std::stol(f[0]);
    s.vif = std::stod(f[1]);
    s.structure = parse_structure(f[2]);
    s.p = std::stoi(f[3]);
    s.beta_main = std::stod(f[4]);
    s.cohens_d = std::stod(f[5]);
    r.n_sims = std::stoi(f[6]);
    if (!f[7].empty()) {
      std::string names = f[7];
      std::replace(names.begin(), names.end(), ';', ',');
      s.omit = parse_omit_list(names);
    }
    std::size_t col = 8;
    for (Estimate* e : {&r.coverage, &r.bias, &r.mae, &r.precision_assurance, &r.power_traditional,
                        &r.mean_ci_width, &r.mean_se}) {
      e->value = std::stod(f[col++]);
      e->mc_se = std::stod(f[col++]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ScenarioResult> read_results_csv(const std::filesystem::path& path) {
  return parse_results_csv(read_text_file(path));
}

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["config_hash"] = m.config_hash;
  j["generator"] = m.generator;
  j["generator_version"] = m.generator_version;
  j["normal_method"] = m.normal_method;
  j["software_version"] = m.software_version;
  j["timestamp"] = m.timestamp;
  j["config"] = m.config;
  j["notes"] = m.notes;
  auto& list = j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : m.scenarios) {
    nlohmann::ordered_json e;
    e["index"] = s.index;
    e["n"] = s.n;
    e["vif"] = s.vif;
    e["structure"] = s.structure;
    e["p"] = s.p;
    e["beta_main"] = s.beta_main;
    e["omit"] = s.omit;
    e["seed_first"] = s.seed_first;
    e["seed_last"] = s.seed_last;
    list.push_back(std::move(e));
  }
  return j;
}

inline RunManifest manifest_from_json(const nlohmann::ordered_json& j) {
  RunManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.generator = j.at("generator").get<std::string>();
  m.generator_version = j.at("generator_version").get<std::string>();
  m.normal_method = j.at("normal_method").get<std::string>();
  m.software_version = j.at("software_version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.config = j.at("config").get<std::string>();
  m.notes = j.at("notes").get<std::vector<std::string>>();
  for (const auto& e : j.at("scenarios")) {
    m.scenarios.push_back({e.at("index").get<std::size_t>(), e.at("n").get<long>(), e.at("vif").get<double>(),
                           e.at("structure").get<std::string>(), e.at("p").get<int>(),
                           e.at("beta_main").get<double>(), e.at("omit").get<std::string>(),
                           e.at("seed_first").get<std::int64_t>(), e.at("seed_last").get<std::int64_t>()});
  }
  return m;
}

inline void write_metadata_json(const RunManifest& m, const std::filesystem::path& path) {
  write_text_file(path, manifest_to_json(m).dump(2) + '\n');
}

inline RunManifest read_metadata_json(const std::filesystem::path& path) {
  try {
    return manifest_from_json(nlohmann::ordered_json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
}

enum class HeatmapMetric { Pa, Power, Coverage, Mae };

inline HeatmapMetric parse_heatmap_metric(std::string_view name) {
  if (name == "pa") return HeatmapMetric::Pa;
  if (name == "power") return HeatmapMetric::Power;
  if (name == "coverage") return HeatmapMetric::Coverage;
  if (name == "mae") return HeatmapMetric::Mae;
  throw ConfigError("unknown heatmap metric '" + std::string(name) + "' (expected pa|power|coverage|mae)");
}

inline std::string_view to_string(HeatmapMetric m) {
  switch (m) {
    case HeatmapMetric::Pa: return "pa";
    case HeatmapMetric::Power: return "power";
    case HeatmapMetric::Coverage: return "coverage";
    case HeatmapMetric::Mae: return "mae";
  }
  return "?";
}

inline double metric_value(const ScenarioResult& r, HeatmapMetric m) {
  switch (m) {
    case HeatmapMetric::Pa: return r.precision_assurance.value;
    case HeatmapMetric::Power: return r.power_traditional.value;
    case HeatmapMetric::Coverage: return r.coverage.value;
    case HeatmapMetric::Mae: return r.mae.value;
  }
  return 0.0;
}

/// Rows: n ascending; columns: vif ascending; top-left cell "n/vif".
inline std::string heatmap_csv_text(const std::vector<ScenarioResult>& results, HeatmapMetric metric) {
  if (results.empty()) throw ShapeError("no results for heatmap");
  std::set<long> ns;
  std::set<double> vifs;
  std::map<std::pair<long, double>, double> cells;
  for (const auto& r : results) {
    ns.insert(r.scenario.n);
    vifs.insert(r.scenario.vif);
    if (!cells.emplace(std::make_pair(r.scenario.n, r.scenario.vif), metric_value(r, metric)).second) {
      throw ShapeError("duplicate heatmap cell (n=" + std::to_string(r.scenario.n) + ", vif=" +
                       format_real(r.scenario.vif) + "); filter to one structure/beta_main first");
    }
  }
  std::string missing;
  for (long n : ns)
    for (double v : vifs)
      if (!cells.count({n, v})) missing += " (n=" + std::to_string(n) + ", vif=" + format_real(v) + ")";
  if (!missing.empty()) throw ShapeError("ragged heatmap grid; missing cells:" + missing);

  std::string out = "n/vif";
  for (double v : vifs) out += ',' + format_real(v);
  out += '\n';
  for (long n : ns) {
    out += std::to_string(n);
    for (double v : vifs) out += ',' + format_real(cells.at({n, v}));
    out += '\n';
  }
  return out;
}

inline void export_heatmap_grid(const std::vector<ScenarioResult>& results, HeatmapMetric metric,
                                const std::filesystem::path& path) {
  write_text_file(path, heatmap_csv_text(results, metric));
}

}  // namespace collinsim
