#include <gtest/gtest.h>

#include "collinsim/grid.hpp"
#include "collinsim/report.hpp"
#include "collinsim/runner.hpp"

using namespace collinsim;

namespace {

GridConfig small_grid() {
  GridConfig g;
  g.n_grid = {100, 1000};
  g.vif_grid = {1, 5};
  g.n_sims = 200;
  return g;
}

Scenario scenario(long n, double vif) {
  Scenario s;
  s.n = n;
  s.spec = {Structure::PairwiseMain, vif, 6};
  return s;
}

}  // namespace

TEST(Enumerate, DefaultGridSize) {
  const GridConfig g;
  EXPECT_EQ(enumerate_scenarios(g).size(), 7u * default_vif_grid().size());
}

TEST(Enumerate, SingleCell) {
  GridConfig g;
  g.n_grid = {500};
  g.vif_grid = {2};
  const auto s = enumerate_scenarios(g);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].n, 500);
  EXPECT_EQ(s[0].spec.target_vif, 2.0);
  EXPECT_EQ(s[0].beta_main(), 2.0);
}

TEST(Enumerate, SweepMultipliesAndOrders) {
  GridConfig g = small_grid();
  g.n_grid = {1000, 100};
  g.beta_main_sweep = effect_size_sweep();
  const auto s = enumerate_scenarios(g);
  ASSERT_EQ(s.size(), 4u * 21u);
  EXPECT_EQ(s.front().n, 100);
  EXPECT_EQ(s.front().beta_main(), 0.0);
  EXPECT_EQ(s[20].beta_main(), 2.0);
  EXPECT_EQ(s[21].spec.target_vif, 5.0);
  EXPECT_EQ(s.back().n, 1000);
}

TEST(Enumerate, ReportsInvalidCellsWithIndices) {
  GridConfig g = small_grid();
  g.n_grid = {5, 100};
  g.vif_grid = {0.5, 2};
  try {
    enumerate_scenarios(g);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("n_index 0, vif_index 0"), std::string::npos);
    EXPECT_NE(msg.find("n_index 0, vif_index 1"), std::string::npos);
    EXPECT_NE(msg.find("n_index 1, vif_index 0"), std::string::npos);
    EXPECT_EQ(msg.find("n_index 1, vif_index 1"), std::string::npos);
  }
  g = small_grid();
  g.vif_grid = {2, 2};
  EXPECT_THROW(enumerate_scenarios(g), ConfigError);
  g = small_grid();
  g.betas.pop_back();
  EXPECT_THROW(enumerate_scenarios(g), ConfigError);
}

TEST(Presets, Shapes) {
  const std::size_t vifs = default_vif_grid().size();
  EXPECT_EQ(enumerate_scenarios(preset_configs("fig1").front()).size(), 7 * vifs);
  EXPECT_EQ(enumerate_scenarios(preset_configs("fig4").front()).size(), 3 * vifs * 21);
  const auto s1 = preset_configs("s1");
  ASSERT_EQ(s1.size(), 4u);
  EXPECT_EQ(s1.back().n_sims, 10000);
  const auto s5 = preset_configs("s5").front();
  EXPECT_EQ(s5.p, 20);
  EXPECT_EQ(s5.betas.size(), 20u);
  EXPECT_EQ(s5.structure, Structure::Equicorrelated);
  EXPECT_EQ(preset_configs("s11").front().omit, (std::vector<int>{4}));
  EXPECT_THROW(preset_configs("fig3"), ConfigError);
}

TEST(ParallelFor, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, 4, [](std::size_t i) {
      if (i == 17 || i == 60) throw std::runtime_error("boom " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "boom 17");
  }
}

TEST(RunScenario, ThreadCountDoesNotChangeResults) {
  Scenario s = scenario(300, 10);
  s.n_sims = 64;
  const auto a = simulate_fits(s, RunOptions{1, nullptr});
  const auto b = simulate_fits(s, RunOptions{8, nullptr});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].beta_hat, b[i].beta_hat);
    EXPECT_EQ(a[i].se, b[i].se);
  }
}

TEST(RunScenario, CacheDoesNotChangeResults) {
  Scenario s = scenario(200, 3);
  s.n_sims = 50;
  BasisCache cache;
  const auto cold = run_scenario(s, PrecisionMargin{}, RunOptions{1, &cache});
  EXPECT_EQ(cache.size(), 1u);
  const auto warm = run_scenario(s, PrecisionMargin{}, RunOptions{1, &cache});
  const auto none = run_scenario(s, PrecisionMargin{}, RunOptions{1, nullptr});
  EXPECT_EQ(results_row(cold), results_row(warm));
  EXPECT_EQ(results_row(cold), results_row(none));
}

TEST(RunScenario, CalibrationAnchorAndCliff) {
  BasisCache cache;
  const RunOptions opt{1, &cache};
  const auto base = run_scenario(scenario(1000, 1), PrecisionMargin{}, opt);
  EXPECT_NEAR(base.precision_assurance.value, 0.80, 0.04);
  EXPECT_LE(run_scenario(scenario(1000, 3), PrecisionMargin{}, opt).precision_assurance.value, 0.005);
}

TEST(SweepEffectSizes, MatchesIndependentRuns) {
  Scenario s = scenario(500, 5);
  s.n_sims = 100;
  const std::vector<double> betas{0.0, 0.7, 2.0};
  const auto sweep = sweep_effect_sizes(s, betas, PrecisionMargin{}, RunOptions{1, nullptr});
  for (std::size_t i = 0; i < betas.size(); ++i) {
    Scenario alone = s;
    alone.betas[0] = betas[i];
    const auto r = run_scenario_direct(alone, PrecisionMargin{}, 1);
    EXPECT_NEAR(sweep[i].coverage.value, r.coverage.value, 1e-9);
    EXPECT_NEAR(sweep[i].mae.value, r.mae.value, 1e-9);
    EXPECT_NEAR(sweep[i].bias.value, r.bias.value, 1e-9);
    EXPECT_NEAR(sweep[i].power_traditional.value, r.power_traditional.value, 1e-9);
    EXPECT_NEAR(sweep[i].mean_se.value, r.mean_se.value, 1e-9);
    EXPECT_EQ(sweep[i].scenario.beta_main, betas[i]);
  }
  EXPECT_NEAR(sweep[0].power_traditional.value, 0.05, 3 * std::sqrt(0.05 * 0.95 / 100));
}

TEST(RunScenarios, FailureAbortsOnlyThatScenario) {
  std::vector<Scenario> list{scenario(100, 1), scenario(100, 2), scenario(100, 4)};
  for (auto& s : list) s.n_sims = 20;
  list[1].beta_main_index = 9;
  const auto out = run_scenarios(list, PrecisionMargin{}, RunOptions{1, nullptr});
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].scenario_index, 1u);
  EXPECT_EQ(out.results.size(), 2u);
  EXPECT_EQ(out.result_indices, (std::vector<std::size_t>{0, 2}));
}

TEST(ReplicateError, CarriesSimIndex) {
  try {
    parallel_for(10, 1, [](std::size_t i) {
      try {
        if (i == 6) throw SingularFitError("bad fit");
      } catch (...) {
        rethrow_as_replicate_error(i);
      }
    });
    FAIL();
  } catch (const ReplicateError& e) {
    EXPECT_EQ(e.sim_index(), 6u);
    EXPECT_NE(std::string(e.what()).find("bad fit"), std::string::npos);
  }
}

TEST(RunGrid, DeterministicAcrossThreadsAndReruns) {
  const GridConfig g = small_grid();
  const GridRun a = run_grid(g, RunOptions{1, nullptr});
  const GridRun b = run_grid(g, RunOptions{8, nullptr});
  const GridRun c = run_grid(g, RunOptions{3, nullptr});
  ASSERT_TRUE(a.ok());
  EXPECT_EQ(a.results.size(), 4u);
  EXPECT_EQ(results_csv_text(a.results), results_csv_text(b.results));
  EXPECT_EQ(results_csv_text(a.results), results_csv_text(c.results));
  for (auto m : {HeatmapMetric::Pa, HeatmapMetric::Power, HeatmapMetric::Coverage, HeatmapMetric::Mae})
    EXPECT_EQ(heatmap_csv_text(a.results, m), heatmap_csv_text(b.results, m));
}

TEST(RunGrid, SeedBaseChangesDraws) {
  GridConfig g = small_grid();
  const GridRun a = run_grid(g, RunOptions{1, nullptr});
  g.seed_base = 5000;
  const GridRun b = run_grid(g, RunOptions{1, nullptr});
  EXPECT_NE(results_csv_text(a.results), results_csv_text(b.results));
  EXPECT_EQ(b.manifest.scenarios.front().seed_first, 5000);
  EXPECT_EQ(b.manifest.scenarios.front().seed_last, 5199);
}

TEST(Misspecification, PrecisionAssuranceCollapses) {
  GridConfig g = preset_configs("s11").front();
  g.n_grid = {1000, 100000};
  g.vif_grid = {1.1, 5, 50};
  g.n_sims = 100;
  const GridRun run = run_grid(g, RunOptions{1, nullptr});
  ASSERT_TRUE(run.ok());
  for (const auto& r : run.results) EXPECT_EQ(r.precision_assurance.value, 0.0);
}
