#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <string>

#include "collinsim/errors.hpp"
#include "collinsim/lsq.hpp"

namespace collinsim {

inline constexpr double kConfidenceQuantile = 0.975;  // two-sided 95% interval

/// Quantile `level` of Student's t with `df` degrees of freedom.
inline double t_critical(long df, double level = kConfidenceQuantile) {
  if (df < 1) throw DomainError("t_critical needs df >= 1, got " + std::to_string(df));
  if (!(level > 0.0 && level < 1.0)) throw DomainError("t_critical level must lie in (0, 1)");
  const boost::math::students_t dist(static_cast<double>(df));
  return boost::math::quantile(dist, level);
}

/// Inference for the tracked coefficient of one replicate.
struct FitSummary {
  double beta_hat = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long df = 0;
  double sigma_hat = 0.0;
  Eigen::VectorXd all_coefficients;  // intercept first, then fitted predictors

  double half_width() const noexcept { return 0.5 * (ci_high - ci_low); }
  double width() const noexcept { return ci_high - ci_low; }
};

/// Assembles a FitSummary from intercept-first coefficients and diag((X^T X)^-1).
inline FitSummary summarize_fit(Eigen::VectorXd coefficients, const Eigen::VectorXd& inverse_gram_diag,
                                double rss, long df, int tracked_index, double t_crit) {
  FitSummary f;
  const Eigen::Index col = tracked_index + 1;
  f.df = df;
  f.sigma_hat = std::sqrt(rss / static_cast<double>(df));
  f.beta_hat = coefficients(col);
  f.se = f.sigma_hat * std::sqrt(inverse_gram_diag(col));
  f.ci_low = f.beta_hat - t_crit * f.se;
  f.ci_high = f.beta_hat + t_crit * f.se;
  f.all_coefficients = std::move(coefficients);
  return f;
}

/// OLS of y on [1, x]; tracked_index is a column of x (intercept excluded).
inline FitSummary fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int tracked_index) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = x.cols();
  if (tracked_index < 0 || tracked_index >= k) throw std::out_of_range("tracked_index out of range");
  if (n <= k + 1) {
    throw InsufficientDfError("N = " + std::to_string(n) + " leaves no residual df for " + std::to_string(k) +
                              " predictors plus intercept");
  }
  Eigen::MatrixXd design(n, k + 1);
  design.col(0).setOnes();
  design.rightCols(k) = x;
  QrSolution qr = qr_least_squares(design, y);
  const long df = static_cast<long>(n - k - 1);
  return summarize_fit(std::move(qr.coefficients), inverse_gram_diagonal(qr.r), qr.rss, df, tracked_index,
                       t_critical(df));
}

}  // namespace collinsim
