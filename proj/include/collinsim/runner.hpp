#pragma once

// Scenario enumeration and execution.
//
// Replicates are the unit of parallelism. A replicate's data depend only on
// (N, p, seed_base + sim_index), so run_grid computes one ReplicateBasis per
// (N, p, seed) and fits every scenario sharing it from the factored form.
// Fits are stored by sim_index and aggregated in ascending order, which
// makes every output independent of the thread count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "collinsim/corrstruct.hpp"
#include "collinsim/datagen.hpp"
#include "collinsim/errors.hpp"
#include "collinsim/metrics.hpp"
#include "collinsim/ols.hpp"
#include "collinsim/replicate_basis.hpp"

namespace collinsim {

inline std::vector<long> default_n_grid() { return {100, 500, 1000, 5000, 10000, 50000, 100000}; }

/// beta_main values 0, 0.1, ..., 2.0.
inline std::vector<double> effect_size_sweep() {
  std::vector<double> v;
  for (int i = 0; i <= 20; ++i) v.push_back(i / 10.0);
  return v;
}

struct GridConfig {
  std::string label = "custom";
  std::vector<double> vif_grid = default_vif_grid();
  std::vector<long> n_grid = default_n_grid();
  Structure structure = Structure::PairwiseMain;
  int p = 6;
  double beta0 = kDefaultIntercept;
  std::vector<double> betas = six_predictor_betas();
  std::vector<double> beta_main_sweep{};  // empty: use betas[0] only
  double sigma_eps = kDefaultSigmaEps;
  int n_sims = 1000;
  std::int64_t seed_base = 0;
  std::vector<int> omit{};
  double c_powval = kDefaultCPowval;

  /// Switches predictor count; coefficients reset to the preset for 6 or 20
  /// predictors and are otherwise cleared until `betas` is supplied.
  void set_predictor_count(int count) {
    p = count;
    betas = (count == 6 || count == 20) ? default_betas(count) : std::vector<double>{};
  }
};

/// Named experiments. Most expand to one grid; "s1" expands to one grid per
/// replication count.
inline std::vector<GridConfig> preset_configs(const std::string& name) {
  GridConfig g;
  g.label = name;
  if (name == "fig1" || name == "fig2" || name == "fig5") return {g};
  if (name == "fig4") {
    g.n_grid = {100, 1000, 10000};
    g.beta_main_sweep = effect_size_sweep();
    return {g};
  }
  if (name == "s1") {
    std::vector<GridConfig> out;
    for (int sims : {1000, 2000, 5000, 10000}) {
      GridConfig c = g;
      c.n_grid = {100};
      c.n_sims = sims;
      out.push_back(c);
    }
    return out;
  }
  if (name == "s3") {
    g.structure = Structure::Equicorrelated;
    return {g};
  }
  if (name == "s5") {
    g.structure = Structure::Equicorrelated;
    g.set_predictor_count(20);
    return {g};
  }
  if (name == "s11") {
    g.structure = Structure::Equicorrelated;
    g.omit = {4};
    return {g};
  }
  throw ConfigError("unknown preset '" + name + "' (expected fig1|fig2|fig4|fig5|s1|s3|s5|s11)");
}

/// Scenarios ordered by n, then vif, then beta_main (all ascending).
inline std::vector<Scenario> enumerate_scenarios(const GridConfig& g) {
  if (g.vif_grid.empty() || g.n_grid.empty()) throw ConfigError("vif_grid and n_grid must be non-empty");
  if (static_cast<int>(g.betas.size()) != g.p) {
    throw ConfigError("betas has " + std::to_string(g.betas.size()) + " entries but p = " + std::to_string(g.p));
  }
  auto sorted_unique = [](auto values, const char* what) {
    std::sort(values.begin(), values.end());
    if (std::adjacent_find(values.begin(), values.end()) != values.end())
      throw ConfigError(std::string(what) + " contains duplicates");
    return values;
  };
  const auto ns = sorted_unique(g.n_grid, "n_grid");
  const auto vifs = sorted_unique(g.vif_grid, "vif_grid");
  const auto sweep = sorted_unique(g.beta_main_sweep.empty() ? std::vector<double>{g.betas.at(0)} : g.beta_main_sweep,
                                   "beta_main_sweep");
  std::vector<int> omit = g.omit;
  std::sort(omit.begin(), omit.end());

  std::vector<Scenario> out;
  std::string problems;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    for (std::size_t vi = 0; vi < vifs.size(); ++vi) {
      for (double beta_main : sweep) {
        Scenario s;
        s.n = ns[ni];
        s.spec = CorrelationSpec{g.structure, vifs[vi], g.p};
        s.beta0 = g.beta0;
        s.betas = g.betas;
        s.betas[0] = beta_main;
        s.sigma_eps = g.sigma_eps;
        s.n_sims = g.n_sims;
        s.seed_base = g.seed_base;
        s.omit = omit;
        try {
          s.validate();
          cholesky_lower(build_correlation_matrix(s.spec));
        } catch (const std::exception& e) {
          problems += "\n  (n_index " + std::to_string(ni) + ", vif_index " + std::to_string(vi) + "): " + e.what();
          continue;
        }
        out.push_back(std::move(s));
      }
    }
  }
  if (!problems.empty()) throw ConfigError("invalid scenarios:" + problems);
  return out;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers. If any call
/// throws, rethrows the exception of the smallest failing index.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto body = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

using BasisSet = std::vector<ReplicateBasis>;

/// Memoises replicate bases by (N, p, seed_base, n_sims).
class BasisCache {
 public:
  using Key = std::tuple<long, int, std::int64_t, int>;

  std::shared_ptr<const BasisSet> find(const Key& key) const {
    std::lock_guard lock(mutex_);
    auto it = sets_.find(key);
    return it == sets_.end() ? nullptr : it->second;
  }
  void insert(const Key& key, std::shared_ptr<const BasisSet> set) {
    std::lock_guard lock(mutex_);
    sets_.emplace(key, std::move(set));
  }
  void clear() {
    std::lock_guard lock(mutex_);
    sets_.clear();
  }
  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return sets_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const BasisSet>> sets_;
};

struct RunOptions {
  unsigned threads = default_thread_count();
  BasisCache* cache = nullptr;
};

inline void rethrow_as_replicate_error(std::size_t sim_index) {
  try {
    throw;
  } catch (const ReplicateError&) {
    throw;
  } catch (const std::exception& e) {
    throw ReplicateError(sim_index, e.what());
  }
}

inline std::shared_ptr<const BasisSet> replicate_bases(const Scenario& s, const RunOptions& opt) {
  const BasisCache::Key key{s.n, s.p(), s.seed_base, s.n_sims};
  if (opt.cache) {
    if (auto hit = opt.cache->find(key)) return hit;
  }
  auto set = std::make_shared<BasisSet>(static_cast<std::size_t>(s.n_sims));
  parallel_for(set->size(), opt.threads, [&](std::size_t i) {
    try {
      (*set)[i] = make_replicate_basis(s.n, s.p(), s.seed_for(static_cast<long>(i)));
    } catch (...) {
      rethrow_as_replicate_error(i);
    }
  });
  if (opt.cache) opt.cache->insert(key, set);
  return set;
}

inline std::vector<FitSummary> fit_replicates(const Scenario& s, const BasisSet& bases, unsigned threads) {
  const FactoredModel model(s, cholesky_lower(build_correlation_matrix(s.spec)));
  std::vector<FitSummary> fits(bases.size());
  parallel_for(fits.size(), threads, [&](std::size_t i) {
    try {
      fits[i] = model.fit(bases[i]);
    } catch (...) {
      rethrow_as_replicate_error(i);
    }
  });
  return fits;
}

/// Per-replicate fits for a scenario, in sim_index order.
inline std::vector<FitSummary> simulate_fits(const Scenario& s, const RunOptions& opt = {}) {
  s.validate();
  return fit_replicates(s, *replicate_bases(s, opt), opt.threads);
}

/// Reference route: materialise every dataset, drop omitted columns, fit by QR.
inline std::vector<FitSummary> simulate_fits_direct(const Scenario& s, unsigned threads = 1) {
  s.validate();
  const CholeskyFactor chol = cholesky_lower(build_correlation_matrix(s.spec));
  const std::vector<int> cols = s.included_columns();
  std::vector<FitSummary> fits(static_cast<std::size_t>(s.n_sims));
  parallel_for(fits.size(), threads, [&](std::size_t i) {
    try {
      const Dataset d = generate_dataset(s, chol, static_cast<long>(i));
      Eigen::MatrixXd x(d.x.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) x.col(static_cast<Eigen::Index>(c)) = d.x.col(cols[c]);
      fits[i] = fit_ols(x, d.y, s.tracked_fit_index());
    } catch (...) {
      rethrow_as_replicate_error(i);
    }
  });
  return fits;
}

inline ScenarioDescriptor describe(const Scenario& s) {
  return {s.n, s.spec.target_vif, s.spec.structure, s.p(), s.beta_main(), cohens_d(s.beta_main(), s.sigma_eps),
          s.sigma_eps, s.omit};
}

inline ScenarioResult summarize_scenario(const Scenario& s, std::span<const FitSummary> fits, PrecisionMargin margin) {
  ScenarioResult r = summarize(fits, s.beta_main(), margin);
  r.scenario = describe(s);
  return r;
}

inline ScenarioResult run_scenario(const Scenario& s, PrecisionMargin margin = {}, const RunOptions& opt = {}) {
  const auto fits = simulate_fits(s, opt);
  return summarize_scenario(s, fits, margin);
}

inline ScenarioResult run_scenario_direct(const Scenario& s, PrecisionMargin margin = {}, unsigned threads = 1) {
  const auto fits = simulate_fits_direct(s, threads);
  return summarize_scenario(s, fits, margin);
}

/// Runs the scenario once per beta_main value on shared seeds.
inline std::vector<ScenarioResult> sweep_effect_sizes(const Scenario& s, const std::vector<double>& betas_main,
                                                      PrecisionMargin margin = {}, const RunOptions& opt = {}) {
  s.validate();
  const auto bases = replicate_bases(s, opt);
  std::vector<ScenarioResult> out;
  out.reserve(betas_main.size());
  for (double b : betas_main) {
    Scenario variant = s;
    variant.betas[static_cast<std::size_t>(s.beta_main_index)] = b;
    out.push_back(summarize_scenario(variant, fit_replicates(variant, *bases, opt.threads), margin));
  }
  return out;
}

/// Margin calibrated on a baseline scenario's fixed seed set.
inline PrecisionMargin calibrate_c_powval(const Scenario& baseline, double target_pa,
                                          double tol = kDefaultCalibrationTolerance, const RunOptions& opt = {}) {
  const auto fits = simulate_fits(baseline, opt);
  return calibrate_c_powval(std::span<const FitSummary>(fits), baseline.beta_main(), target_pa, tol);
}

struct ScenarioFailure {
  std::size_t scenario_index = 0;
  long sim_index = -1;
  std::string message;
};

struct ScenarioOutcomes {
  std::vector<ScenarioResult> results;  // successful scenarios, enumeration order
  std::vector<std::size_t> result_indices;
  std::vector<ScenarioFailure> failures;
};

/// Runs scenarios grouped by shared replicate bases. A failing replicate
/// aborts its scenario; other scenarios continue.
inline ScenarioOutcomes run_scenarios(const std::vector<Scenario>& scenarios, PrecisionMargin margin,
                                      const RunOptions& opt = {}) {
  std::map<BasisCache::Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const Scenario& s = scenarios[i];
    groups[{s.n, s.p(), s.seed_base, s.n_sims}].push_back(i);
  }
  std::vector<std::optional<ScenarioResult>> slots(scenarios.size());
  std::vector<ScenarioFailure> failures;
  auto record_failure = [&](std::size_t idx) {
    try {
      throw;
    } catch (const ReplicateError& e) {
      failures.push_back({idx, static_cast<long>(e.sim_index()), e.what()});
    } catch (const std::exception& e) {
      failures.push_back({idx, -1, e.what()});
    }
  };
  for (const auto& [key, members] : groups) {
    BasisCache local;
    RunOptions group_opt = opt;
    if (!group_opt.cache) group_opt.cache = &local;
    std::shared_ptr<const BasisSet> bases;
    try {
      bases = replicate_bases(scenarios[members.front()], group_opt);
    } catch (...) {
      for (std::size_t idx : members) record_failure(idx);
      continue;
    }
    for (std::size_t idx : members) {
      try {
        const Scenario& s = scenarios[idx];
        s.validate();
        const auto fits = fit_replicates(s, *bases, opt.threads);
        slots[idx] = summarize_scenario(s, fits, margin);
      } catch (...) {
        record_failure(idx);
      }
    }
  }
  ScenarioOutcomes out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i]) {
      out.results.push_back(std::move(*slots[i]));
      out.result_indices.push_back(i);
    }
  }
  std::sort(failures.begin(), failures.end(),
            [](const ScenarioFailure& a, const ScenarioFailure& b) { return a.scenario_index < b.scenario_index; });
  out.failures = std::move(failures);
  return out;
}

}  // namespace collinsim
