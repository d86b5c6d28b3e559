#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <string_view>
#include <vector>

#include "collinsim/config.hpp"
#include "collinsim/philox.hpp"
#include "collinsim/runner.hpp"

namespace collinsim {

inline constexpr std::string_view kSoftwareVersion = "1.0.0";

/// 64-bit FNV-1a, rendered as 16 hex digits.
inline std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
  return out;
}

struct SeedRange {
  std::size_t index = 0;
  long n = 0;
  double vif = 1.0;
  std::string structure;
  int p = 0;
  double beta_main = 0.0;
  std::string omit;
  std::int64_t seed_first = 0;
  std::int64_t seed_last = 0;

  bool operator==(const SeedRange&) const = default;
};

struct RunManifest {
  std::string config_hash;
  std::string generator{kGeneratorName};
  std::string generator_version{kGeneratorVersion};
  std::string normal_method{kNormalMethod};
  std::string software_version{kSoftwareVersion};
  std::string timestamp;
  std::string config;  // canonical config text(s)
  std::vector<std::string> notes;
  std::vector<SeedRange> scenarios;

  bool operator==(const RunManifest&) const = default;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string omit_label(const std::vector<int>& omit) {
  std::string out;
  for (std::size_t i = 0; i < omit.size(); ++i) out += (i ? ";" : "") + predictor_name(omit[i]);
  return out;
}

inline std::vector<std::string> default_manifest_notes() {
  return {
      "seed for replicate i is seed_base + i",
      "design and error draws come from separate labelled substreams of that seed",
      "raw design depends only on (N, p, seed); identical across VIF levels, structures and coefficients",
      "design = raw standard normals times L^T, L the lower Cholesky factor of the correlation matrix",
  };
}

inline RunManifest make_manifest(const std::vector<GridConfig>& configs,
                                 const std::vector<std::vector<Scenario>>& scenarios) {
  RunManifest m;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    if (c) m.config += "---\n";
    m.config += to_config_text(configs[c]);
  }
  m.config_hash = fnv1a_hex(m.config);
  m.timestamp = utc_timestamp();
  m.notes = default_manifest_notes();
  std::size_t index = 0;
  for (const auto& list : scenarios) {
    for (const auto& s : list) {
      m.scenarios.push_back({index++, s.n, s.spec.target_vif, std::string(to_string(s.spec.structure)), s.p(),
                             s.beta_main(), omit_label(s.omit), s.seed_base, s.seed_base + s.n_sims - 1});
    }
  }
  return m;
}

struct GridRun {
  std::vector<ScenarioResult> results;
  std::vector<ScenarioFailure> failures;
  RunManifest manifest;

  bool ok() const noexcept { return failures.empty(); }
};

/// Runs several grids in order; results are concatenated and failure indices
/// refer to the concatenated enumeration.
inline GridRun run_grids(const std::vector<GridConfig>& configs, const RunOptions& opt = {}) {
  std::vector<std::vector<Scenario>> all;
  for (const auto& g : configs) all.push_back(enumerate_scenarios(g));
  GridRun run;
  run.manifest = make_manifest(configs, all);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    auto outcome = run_scenarios(all[c], PrecisionMargin{configs[c].c_powval}, opt);
    for (auto& r : outcome.results) run.results.push_back(std::move(r));
    for (auto f : outcome.failures) {
      f.scenario_index += offset;
      run.failures.push_back(std::move(f));
    }
    offset += all[c].size();
  }
  return run;
}

inline GridRun run_grid(const GridConfig& g, const RunOptions& opt = {}) { return run_grids({g}, opt); }

}  // namespace collinsim
