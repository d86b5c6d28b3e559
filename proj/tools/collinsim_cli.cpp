// collinsim command-line driver.
//
//   collinsim run --config PATH --out DIR [overrides]
//   collinsim preset fig1|fig2|fig4|fig5|s1|s3|s5|s11 --out DIR [overrides]
//   collinsim calibrate [--config PATH] [--n N] [--vif V] [--target PA] [--tol T] [overrides]
//   collinsim check [--config PATH] [overrides]
//
// Exit codes: 0 success, 2 configuration error, 3 scenario failure, 1 other errors.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "collinsim/collinsim.hpp"

namespace fs = std::filesystem;
using namespace collinsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitScenario = 3;

struct Overrides {
  std::string config_path;
  std::optional<std::int64_t> seed_base;
  std::optional<int> n_sims;
  std::optional<std::string> omit;
  std::optional<std::string> structure;
  std::optional<int> p;
  bool sweep_beta_main = false;
  unsigned threads = default_thread_count();

  void attach(CLI::App* cmd, bool with_config = true) {
    if (with_config) cmd->add_option("--config", config_path, "Flat key = value config file");
    cmd->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed-base", seed_base, "First seed; replicate i uses seed-base + i");
    cmd->add_option("--n-sims", n_sims, "Replicates per scenario")->check(CLI::PositiveNumber);
    cmd->add_option("--omit", omit, "Comma separated predictors to drop before fitting (e.g. x4)");
    cmd->add_option("--structure", structure, "pairwise | equi");
    cmd->add_option("--p", p, "Predictor count (6 or 20 use the built-in coefficients)");
    cmd->add_flag("--sweep-beta-main", sweep_beta_main, "Sweep beta_main over 0, 0.1, ..., 2");
  }

  void apply(GridConfig& g) const {
    if (p) g.set_predictor_count(*p);
    if (structure) g.structure = parse_structure(*structure);
    if (seed_base) g.seed_base = *seed_base;
    if (n_sims) g.n_sims = *n_sims;
    if (omit) g.omit = parse_omit_list(*omit);
    if (sweep_beta_main) g.beta_main_sweep = effect_size_sweep();
  }

  std::vector<GridConfig> configs(std::vector<GridConfig> base) const {
    for (auto& g : base) apply(g);
    return base;
  }

  GridConfig single() const {
    GridConfig g = config_path.empty() ? GridConfig{} : load_config_file(config_path);
    apply(g);
    return g;
  }
};

std::string group_suffix(const ScenarioResult& r, bool by_beta, bool by_sims, bool by_other) {
  std::string s;
  if (by_beta) s += "_beta" + format_real(r.scenario.beta_main);
  if (by_sims) s += "_sims" + std::to_string(r.n_sims);
  if (by_other) {
    s += "_" + std::string(to_string(r.scenario.structure)) + "_p" + std::to_string(r.scenario.p);
    if (!r.scenario.omit.empty()) s += "_omit" + omit_label(r.scenario.omit);
  }
  return s;
}

/// One heatmap per metric and per (structure, p, beta_main, n_sims, omit) group.
void write_heatmaps(const std::vector<ScenarioResult>& results, const fs::path& out_dir) {
  using GroupKey = std::tuple<std::string, int, double, int, std::string>;
  std::map<GroupKey, std::vector<ScenarioResult>> groups;
  std::vector<GroupKey> order;
  for (const auto& r : results) {
    GroupKey key{std::string(to_string(r.scenario.structure)), r.scenario.p, r.scenario.beta_main, r.n_sims,
                 omit_label(r.scenario.omit)};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(r);
  }
  std::set<double> betas;
  std::set<int> sims;
  std::set<std::tuple<std::string, int, std::string>> others;
  for (const auto& k : order) {
    betas.insert(std::get<2>(k));
    sims.insert(std::get<3>(k));
    others.insert({std::get<0>(k), std::get<1>(k), std::get<4>(k)});
  }
  for (const auto& key : order) {
    const auto& rows = groups.at(key);
    const std::string suffix = group_suffix(rows.front(), betas.size() > 1, sims.size() > 1, others.size() > 1);
    for (auto metric : {HeatmapMetric::Pa, HeatmapMetric::Power, HeatmapMetric::Coverage, HeatmapMetric::Mae}) {
      try {
        export_heatmap_grid(rows, metric, out_dir / ("heatmap_" + std::string(to_string(metric)) + suffix + ".csv"));
      } catch (const ShapeError& e) {
        std::cerr << "warning: heatmap skipped: " << e.what() << '\n';
      }
    }
  }
}

void dump_datasets(const std::vector<GridConfig>& configs, int count, const fs::path& out_dir) {
  const fs::path dir = out_dir / "datasets";
  fs::create_directories(dir);
  std::size_t index = 0;
  for (const auto& g : configs) {
    for (const auto& s : enumerate_scenarios(g)) {
      const auto chol = cholesky_lower(build_correlation_matrix(s.spec));
      for (int i = 0; i < std::min(count, s.n_sims); ++i) {
        write_dataset_csv(generate_dataset(s, chol, i),
                          dir / ("scenario_" + std::to_string(index) + "_sim_" + std::to_string(i) + ".csv"));
      }
      ++index;
    }
  }
}

int execute_grids(const std::vector<GridConfig>& configs, const fs::path& out_dir, unsigned threads, int dump) {
  if (!fs::is_directory(out_dir)) fs::create_directories(out_dir);
  const auto t0 = std::chrono::steady_clock::now();
  GridRun run = run_grids(configs, RunOptions{threads, nullptr});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!run.results.empty()) {
    write_results_csv(run.results, out_dir / "results.csv");
    write_heatmaps(run.results, out_dir);
  }
  write_metadata_json(run.manifest, out_dir / "manifest.json");
  if (dump > 0) dump_datasets(configs, dump, out_dir);
  std::fprintf(stderr, "%zu scenarios, %zu failed, %.1f s -> %s\n", run.results.size() + run.failures.size(),
               run.failures.size(), secs, out_dir.string().c_str());
  for (const auto& f : run.failures)
    std::fprintf(stderr, "scenario %zu failed: %s\n", f.scenario_index, f.message.c_str());
  return run.ok() ? 0 : kExitScenario;
}

int run_check(const GridConfig& g, unsigned threads) {
  const auto scenarios = enumerate_scenarios(g);
  const PrecisionMargin margin{g.c_powval};
  BasisCache cache;
  std::printf("%8s %6s %8s %9s | %10s %10s %8s | %9s %9s %7s | %6s %6s %7s | %6s %6s %7s | %9s %9s %7s\n", "n", "vif",
              "structure", "beta_main", "se_sim", "se_oracle", "se_rel", "mae_sim", "mae_orc", "z", "pa_sim",
              "pa_orc", "delta", "pow_sim", "pow_orc", "delta", "bias_sim", "bias_orc", "z");
  for (const auto& s : scenarios) {
    const ScenarioResult r = run_scenario(s, margin, RunOptions{threads, &cache});
    const auto corr = build_correlation_matrix(s.spec);
    const double bias_oracle =
        s.omit.empty() ? 0.0
                       : ovb_bias_general(corr, s.included_columns(), s.omit, s.betas)(s.tracked_fit_index());
    const double z_bias = r.bias.mc_se > 0 ? (r.bias.value - bias_oracle) / r.bias.mc_se : 0.0;
    std::printf("%8ld %6.3g %8s %9.3g | ", s.n, s.spec.target_vif, std::string(to_string(s.spec.structure)).c_str(),
                s.beta_main());
    if (s.omit.empty()) {
      const auto o = evaluate({s.n, s.spec.target_vif, s.sigma_eps, g.c_powval, s.beta_main(), s.fitted_predictors()});
      std::printf("%10.5g %10.5g %+8.4f | %9.5g %9.5g %+7.2f | %6.3f %6.3f %+7.3f | %6.3f %6.3f %+7.3f | ",
                  r.mean_se.value, o.se, r.mean_se.value / o.se - 1.0, r.mae.value, o.mae,
                  r.mae.mc_se > 0 ? (r.mae.value - o.mae) / r.mae.mc_se : 0.0, r.precision_assurance.value, o.pa,
                  r.precision_assurance.value - o.pa, r.power_traditional.value, o.power,
                  r.power_traditional.value - o.power);
    } else {
      std::printf("%10.5g %10s %8s | %9.5g %9s %7s | %6.3f %6s %7s | %6.3f %6s %7s | ", r.mean_se.value, "n/a", "",
                  r.mae.value, "n/a", "", r.precision_assurance.value, "n/a", "", r.power_traditional.value, "n/a",
                  "");
    }
    std::printf("%+9.5f %+9.5f %+7.2f\n", r.bias.value, bias_oracle, z_bias);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo study of collinearity, sample size and OLS inference"};
  app.require_subcommand(1);

  Overrides run_opts;
  std::string run_out;
  int run_dump = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario grid from a config file");
  run_opts.attach(run_cmd);
  run_cmd->add_option("--out", run_out, "Output directory")->required();
  run_cmd->add_option("--dump", run_dump, "Also write the first K replicates of every scenario as CSV");

  Overrides preset_opts;
  std::string preset_name, preset_out;
  int preset_dump = 0;
  auto* preset_cmd = app.add_subcommand("preset", "Run a named experiment");
  preset_cmd->add_option("name", preset_name, "fig1|fig2|fig4|fig5|s1|s3|s5|s11")->required();
  preset_opts.attach(preset_cmd, false);
  preset_cmd->add_option("--out", preset_out, "Output directory")->required();
  preset_cmd->add_option("--dump", preset_dump, "Also write the first K replicates of every scenario as CSV");

  Overrides cal_opts;
  long cal_n = 1000;
  double cal_vif = 1.0, cal_target = 0.8, cal_tol = kDefaultCalibrationTolerance;
  auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate c_powval on a baseline scenario");
  cal_opts.attach(cal_cmd);
  cal_cmd->add_option("--n", cal_n, "Baseline sample size");
  cal_cmd->add_option("--vif", cal_vif, "Baseline VIF");
  cal_cmd->add_option("--target", cal_target, "Target precision assurance");
  cal_cmd->add_option("--tol", cal_tol, "Accepted |PA - target|");

  Overrides check_opts;
  auto* check_cmd = app.add_subcommand("check", "Compare simulated metrics with closed-form oracles");
  check_opts.attach(check_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      if (run_opts.config_path.empty()) throw ConfigError("run needs --config");
      return execute_grids({run_opts.single()}, run_out, run_opts.threads, run_dump);
    }
    if (*preset_cmd) {
      return execute_grids(preset_opts.configs(preset_configs(preset_name)), preset_out, preset_opts.threads,
                           preset_dump);
    }
    if (*cal_cmd) {
      GridConfig g = cal_opts.single();
      Scenario s = enumerate_scenarios(g).front();
      s.n = cal_n;
      s.spec.target_vif = cal_vif;
      s.validate();
      const PrecisionMargin m = calibrate_c_powval(s, cal_target, cal_tol, RunOptions{cal_opts.threads, nullptr});
      const auto fits = simulate_fits(s, RunOptions{cal_opts.threads, nullptr});
      std::printf("c_powval = %.6g\n", m.c_powval);
      std::printf("precision assurance at c_powval: %.4f (target %.4f, N = %ld, VIF = %g, %d sims)\n",
                  precision_assurance_rate(fits, s.beta_main(), m.c_powval), cal_target, s.n, cal_vif, s.n_sims);
      return 0;
    }
    if (*check_cmd) {
      GridConfig g = check_opts.config_path.empty() ? GridConfig{} : load_config_file(check_opts.config_path);
      if (check_opts.config_path.empty()) {
        g.n_grid = {100, 1000, 10000};
        g.vif_grid = {1, 2, 5, 10, 25, 50};
      }
      check_opts.apply(g);
      return run_check(g, check_opts.threads);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ScenarioError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration failed: " << e.what() << '\n';
    return kExitScenario;
  } catch (const ReplicateError& e) {
    std::cerr << "scenario failed: " << e.what() << '\n';
    return kExitScenario;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
