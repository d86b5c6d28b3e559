#pragma once

// Closed-form large-sample approximations used to cross-check simulated
// metrics. They use the normal critical value and population moments, so
// they ignore the t and degrees-of-freedom corrections present in the
// simulation.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <vector>

#include "collinsim/corrstruct.hpp"

namespace collinsim {

inline constexpr double kNormalCritical975 = 1.959963984540054;

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

struct OracleInputs {
  long n = 1000;
  double vif = 1.0;
  double sigma_eps = 0.0;
  double c = 0.189;
  double beta = 2.0;
  int p_included = 6;
};

/// sigma * sqrt(vif / n)
inline double analytic_se(double n, double vif, double sigma_eps) { return sigma_eps * std::sqrt(vif / n); }

inline double analytic_mae(double n, double vif, double sigma_eps) {
  return analytic_se(n, vif, sigma_eps) * std::sqrt(2.0 / std::numbers::pi);
}

/// P(|error| + h <= c) for error ~ N(0, s^2) and fixed half-width h = z * s.
inline double analytic_pa(double n, double vif, double sigma_eps, double c) {
  const double s = analytic_se(n, vif, sigma_eps);
  const double h = kNormalCritical975 * s;
  if (h >= c) return 0.0;
  return 2.0 * normal_cdf((c - h) / s) - 1.0;
}

inline double analytic_power(double n, double vif, double sigma_eps, double beta) {
  const double s = analytic_se(n, vif, sigma_eps);
  const double shift = std::abs(beta) / s;
  return normal_cdf(shift - kNormalCritical975) + normal_cdf(-shift - kNormalCritical975);
}

/// Shift of each included coefficient when one predictor of an equicorrelated
/// set is dropped and k_included remain.
inline double ovb_bias_equicorrelated(double r, double beta_omitted, int k_included) {
  return beta_omitted * r / (1.0 + (k_included - 1) * r);
}

/// Population shift of every included coefficient: R_II^-1 R_IO beta_O.
/// Works for any correlation matrix and omission set; `included` and `omitted`
/// index into the predictors.
inline Eigen::VectorXd ovb_bias_general(const CorrelationMatrix& corr, const std::vector<int>& included,
                                        const std::vector<int>& omitted, const std::vector<double>& betas) {
  const auto ki = static_cast<Eigen::Index>(included.size());
  const auto ko = static_cast<Eigen::Index>(omitted.size());
  Eigen::MatrixXd r_ii(ki, ki), r_io(ki, ko);
  Eigen::VectorXd beta_o(ko);
  for (Eigen::Index a = 0; a < ki; ++a) {
    for (Eigen::Index b = 0; b < ki; ++b) r_ii(a, b) = corr(included[a], included[b]);
    for (Eigen::Index b = 0; b < ko; ++b) r_io(a, b) = corr(included[a], omitted[b]);
  }
  for (Eigen::Index b = 0; b < ko; ++b) beta_o(b) = betas[static_cast<std::size_t>(omitted[b])];
  return r_ii.llt().solve(r_io * beta_o);
}

struct OracleValues {
  double se = 0.0;
  double mae = 0.0;
  double pa = 0.0;
  double power = 0.0;
};

inline OracleValues evaluate(const OracleInputs& in) {
  const auto n = static_cast<double>(in.n);
  return {analytic_se(n, in.vif, in.sigma_eps), analytic_mae(n, in.vif, in.sigma_eps),
          analytic_pa(n, in.vif, in.sigma_eps, in.c), analytic_power(n, in.vif, in.sigma_eps, in.beta)};
}

}  // namespace collinsim
