#include <gtest/gtest.h>

#include <cmath>

#include "collinsim/oracles.hpp"
#include "collinsim/runner.hpp"

using namespace collinsim;

namespace {

const double kSigma = kDefaultSigmaEps;

Scenario scenario(long n, double vif, Structure st = Structure::PairwiseMain) {
  Scenario s;
  s.n = n;
  s.spec = {st, vif, 6};
  return s;
}

}  // namespace

TEST(AnalyticSe, Examples) {
  EXPECT_NEAR(analytic_se(1000, 1, kSigma), 0.05736, 1e-5);
  EXPECT_NEAR(analytic_se(100000, 50, kSigma), 0.04056, 1e-5);
  EXPECT_EQ(analytic_se(100, 10, 0.0), 0.0);
}

TEST(AnalyticMae, Examples) {
  EXPECT_NEAR(analytic_mae(100000, 50, kSigma), 0.0324, 1e-4);
  EXPECT_NEAR(analytic_mae(100, 50, kSigma), 1.023, 1e-3);
}

TEST(AnalyticPa, Examples) {
  EXPECT_NEAR(analytic_pa(1000, 1, kSigma, 0.189), 0.82, 0.01);
  EXPECT_EQ(analytic_pa(1000, 3, kSigma, 0.189), 0.0);
  EXPECT_NEAR(analytic_pa(1000, 1, kSigma, 100.0), 1.0, 1e-12);
}

TEST(AnalyticPower, Examples) {
  EXPECT_NEAR(analytic_power(1000, 1, kSigma, 0.0), 0.05, 1e-3);
  EXPECT_NEAR(analytic_power(100, 15, kSigma, 2.0), 0.81, 0.01);
  EXPECT_GT(analytic_power(10000, 1, kSigma, 0.3), 0.99);
  EXPECT_NEAR(analytic_power(10000, 50, kSigma, 0.3), 0.6477, 1e-3);
  EXPECT_NEAR(analytic_power(100, 10, kSigma, -2.0), analytic_power(100, 10, kSigma, 2.0), 1e-15);
}

TEST(Evaluate, Bundles) {
  const OracleValues o = evaluate({1000, 2.0, kSigma, 0.189, 2.0, 6});
  EXPECT_DOUBLE_EQ(o.se, analytic_se(1000, 2.0, kSigma));
  EXPECT_DOUBLE_EQ(o.mae, analytic_mae(1000, 2.0, kSigma));
  EXPECT_DOUBLE_EQ(o.pa, analytic_pa(1000, 2.0, kSigma, 0.189));
  EXPECT_DOUBLE_EQ(o.power, analytic_power(1000, 2.0, kSigma, 2.0));
}

TEST(OmittedVariableBias, Equicorrelated) {
  EXPECT_EQ(ovb_bias_equicorrelated(0.0, 3.0, 5), 0.0);
  EXPECT_NEAR(ovb_bias_equicorrelated(1.0 - 1e-12, 3.0, 5), 0.6, 1e-9);
  EXPECT_NEAR(ovb_bias_equicorrelated(0.574, 3.0, 5), 3.0 * 0.574 / (1.0 + 4.0 * 0.574), 1e-15);
  // Quoted to four decimals as 0.5226; the exact value is 0.52245.
  EXPECT_NEAR(ovb_bias_equicorrelated(0.574, 3.0, 5), 0.5226, 2e-4);
}

TEST(OmittedVariableBias, GeneralMatchesClosedForm) {
  for (double v : {1.5, 2.0, 10.0, 50.0}) {
    const auto corr = build_correlation_matrix({Structure::Equicorrelated, v, 6});
    const Eigen::VectorXd b = ovb_bias_general(corr, {0, 1, 2, 3, 5}, {4}, default_betas(6));
    const double closed = ovb_bias_equicorrelated(corr(0, 1), 3.0, 5);
    for (Eigen::Index j = 0; j < b.size(); ++j) EXPECT_NEAR(b(j), closed, 1e-12);
  }
  const auto pair = build_correlation_matrix({Structure::PairwiseMain, 10.0, 6});
  EXPECT_NEAR(ovb_bias_general(pair, {0, 1, 2, 3, 5}, {4}, default_betas(6))(0), 0.0, 1e-15);
  // Dropping x1 under PairwiseMain shifts x_main by r * beta_1.
  EXPECT_NEAR(ovb_bias_general(pair, {0, 2, 3, 4, 5}, {1}, default_betas(6))(0), pair(0, 1) * 1.3, 1e-12);
}

// Auxiliary-regression route: with N large, OLS of the omitted column on the
// included ones recovers the population coefficients.
TEST(OmittedVariableBias, AuxiliaryRegression) {
  Scenario s = scenario(1000000, 2.0, Structure::Equicorrelated);
  s.n_sims = 1;
  const Dataset d = generate_dataset(s, 0);
  Eigen::MatrixXd included(d.x.rows(), 5);
  included << d.x.col(0), d.x.col(1), d.x.col(2), d.x.col(3), d.x.col(5);
  const FitSummary f = fit_ols(included, d.x.col(4), 0);
  EXPECT_NEAR(f.beta_hat, 0.5226 / 3.0, 0.003);
}

// Simulation-vs-oracle for the sample sizes where normal theory applies.
TEST(Oracle, SimulationAgreesAtModerateN) {
  BasisCache cache;
  const RunOptions opt{1, &cache};
  for (long n : {1000L, 10000L}) {
    for (double v : {1.0, 2.0, 5.0, 10.0, 25.0, 50.0}) {
      const Scenario s = scenario(n, v);
      const ScenarioResult r = run_scenario(s, PrecisionMargin{}, opt);
      const OracleValues o = evaluate({n, v, s.sigma_eps, kDefaultCPowval, s.beta_main(), 6});
      EXPECT_NEAR(r.mean_se.value / o.se, 1.0, 0.03) << n << " " << v;
      EXPECT_NEAR(r.mae.value, o.mae, 3 * r.mae.mc_se) << n << " " << v;
      EXPECT_NEAR(r.precision_assurance.value, o.pa, std::max(0.03, 3 * r.precision_assurance.mc_se)) << n << " " << v;
      EXPECT_NEAR(r.power_traditional.value, o.power, std::max(0.03, 3 * r.power_traditional.mc_se)) << n << " " << v;
    }
  }
}
