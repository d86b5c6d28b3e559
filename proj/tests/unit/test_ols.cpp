#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>

#include "collinsim/datagen.hpp"
#include "collinsim/ols.hpp"

using namespace collinsim;

namespace {

// Student-t CDF by Simpson integration of the density, inverted by bisection.
double t_cdf_numeric(double x, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  auto pdf = [&](double t) { return c * std::pow(1 + t * t / df, -(df + 1) / 2); };
  const int steps = 20000;
  const double h = x / steps;
  double s = pdf(0) + pdf(x);
  for (int i = 1; i < steps; ++i) s += (i % 2 ? 4 : 2) * pdf(i * h);
  return 0.5 + s * h / 3;
}

double t_quantile_numeric(double p, double df) {
  double lo = 0, hi = 100;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_cdf_numeric(mid, df) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  NormalStream s(seed, StreamLabel::Design);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = s.next();
  return m;
}

}  // namespace

TEST(TCritical, Examples) {
  EXPECT_NEAR(t_critical(1000000), 1.95996, 1e-4);
  EXPECT_NEAR(t_critical(1), 12.7062, 1e-3);
  EXPECT_NEAR(t_critical(93), 1.9858, 1e-3);
  EXPECT_THROW(t_critical(0), DomainError);
  EXPECT_THROW(t_critical(5, 1.0), DomainError);
}

TEST(TCritical, MatchesNumericInversion) {
  for (long df : {1L, 2L, 5L, 30L, 93L, 993L}) {
    EXPECT_NEAR(t_critical(df), t_quantile_numeric(0.975, double(df)), 1e-6) << df;
    EXPECT_NEAR(t_critical(df, 0.9), t_quantile_numeric(0.9, double(df)), 1e-6) << df;
  }
}

TEST(TCritical, DecreasesTowardNormal) {
  double prev = t_critical(1);
  for (long df : {2L, 10L, 100L, 10000L}) {
    const double t = t_critical(df);
    EXPECT_LT(t, prev);
    EXPECT_GT(t, 1.959963984540054);
    prev = t;
  }
}

TEST(FitOls, ExactLine) {
  Eigen::MatrixXd x(4, 1);
  x << 1, 2, 3, 4;
  Eigen::VectorXd y(4);
  y << 2, 4, 6, 8;
  const FitSummary f = fit_ols(x, y, 0);
  EXPECT_NEAR(f.beta_hat, 2.0, 1e-12);
  EXPECT_NEAR(f.all_coefficients(0), 0.0, 1e-12);
  EXPECT_NEAR(f.sigma_hat, 0.0, 1e-12);
  EXPECT_EQ(f.df, 2);
}

TEST(FitOls, NoiselessRecovery) {
  Scenario s;
  s.n = 120;
  s.spec = {Structure::Equicorrelated, 50.0, 6};
  s.sigma_eps = 0.0;
  const Dataset d = generate_dataset(s, 0);
  const FitSummary f = fit_ols(d.x, d.y, 0);
  EXPECT_NEAR(f.all_coefficients(0), s.beta0, 1e-8);
  for (int j = 0; j < 6; ++j) EXPECT_NEAR(f.all_coefficients(j + 1), s.betas[j], 1e-8);
}

// Normal-equations oracle: solve (X^T X) b = X^T y by explicit inverse.
TEST(FitOls, MatchesNormalEquations) {
  const Eigen::MatrixXd x = random_matrix(50, 6, 31);
  Eigen::VectorXd y = random_matrix(50, 1, 32).col(0);
  y += x * Eigen::VectorXd::LinSpaced(6, 1.0, 2.0);
  Eigen::MatrixXd design(50, 7);
  design << Eigen::VectorXd::Ones(50), x;
  const Eigen::MatrixXd inv = (design.transpose() * design).inverse();
  const Eigen::VectorXd b = inv * design.transpose() * y;
  const double s2 = (y - design * b).squaredNorm() / (50 - 7);
  const double tq = t_quantile_numeric(0.975, 43);
  for (int j = 0; j < 6; ++j) {
    const FitSummary f = fit_ols(x, y, j);
    const double se = std::sqrt(s2 * inv(j + 1, j + 1));
    EXPECT_NEAR(f.beta_hat, b(j + 1), 1e-8);
    EXPECT_NEAR(f.se, se, 1e-8);
    EXPECT_NEAR(f.ci_low, b(j + 1) - tq * se, 1e-8);
    EXPECT_NEAR(f.ci_high, b(j + 1) + tq * se, 1e-8);
    EXPECT_NEAR((f.all_coefficients - b).cwiseAbs().maxCoeff(), 0.0, 1e-8);
  }
}

TEST(FitOls, ResidualsOrthogonalToDesign) {
  const Eigen::MatrixXd x = random_matrix(80, 4, 7);
  const Eigen::VectorXd y = random_matrix(80, 1, 8).col(0);
  Eigen::MatrixXd design(80, 5);
  design << Eigen::VectorXd::Ones(80), x;
  const QrSolution qr = qr_least_squares(design, y);
  EXPECT_LT((design.transpose() * qr.residuals).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(qr.rss, qr.residuals.squaredNorm(), 1e-14);
}

TEST(FitOls, AffineEquivariance) {
  const Eigen::MatrixXd x = random_matrix(60, 3, 11);
  const Eigen::VectorXd y = random_matrix(60, 1, 12).col(0);
  const FitSummary base = fit_ols(x, y, 1);
  const double a = -2.5, b = 0.75;
  const Eigen::VectorXd y2 = a * y + b * x.col(1) + Eigen::VectorXd::Constant(60, 4.0);
  const FitSummary moved = fit_ols(x, y2, 1);
  EXPECT_NEAR(moved.beta_hat, a * base.beta_hat + b, 1e-12);
  EXPECT_NEAR(moved.se, std::abs(a) * base.se, 1e-12);
  EXPECT_NEAR(moved.width(), std::abs(a) * base.width(), 1e-12);
}

TEST(FitOls, SingularDesign) {
  Eigen::MatrixXd x = random_matrix(30, 3, 1);
  x.col(2) = x.col(0);
  const Eigen::VectorXd y = random_matrix(30, 1, 2).col(0);
  EXPECT_THROW(fit_ols(x, y, 0), SingularFitError);
  x.col(2).setConstant(3.0);  // collinear with the intercept
  EXPECT_THROW(fit_ols(x, y, 0), SingularFitError);
}

TEST(FitOls, InsufficientDf) {
  const Eigen::MatrixXd x = random_matrix(4, 3, 1);
  const Eigen::VectorXd y = random_matrix(4, 1, 2).col(0);
  EXPECT_THROW(fit_ols(x, y, 0), InsufficientDfError);
  const Eigen::MatrixXd x5 = random_matrix(5, 3, 1);
  const Eigen::VectorXd y5 = random_matrix(5, 1, 2).col(0);
  EXPECT_NO_THROW(fit_ols(x5, y5, 0));
  EXPECT_THROW(fit_ols(x5, y5, 3), std::out_of_range);
}

TEST(InverseGramDiagonal, MatchesExplicitInverse) {
  const Eigen::MatrixXd a = random_matrix(40, 5, 3);
  const Eigen::MatrixXd r = Eigen::HouseholderQR<Eigen::MatrixXd>(a).matrixQR().topRows(5).triangularView<Eigen::Upper>();
  const Eigen::VectorXd expect = (a.transpose() * a).inverse().diagonal();
  EXPECT_LT((inverse_gram_diagonal(r) - expect).cwiseAbs().maxCoeff(), 1e-12);
}
