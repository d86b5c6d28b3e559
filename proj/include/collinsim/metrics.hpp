#pragma once

// Outcome measures for the tracked coefficient.
//
// Interval tests use closed intervals on both sides. Monte Carlo standard
// errors: binomial sqrt(q(1-q)/n) for proportions, sample SD / sqrt(n) for
// means (SD with n-1 denominator; zero when n = 1).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "collinsim/corrstruct.hpp"
#include "collinsim/errors.hpp"
#include "collinsim/ols.hpp"

namespace collinsim {

inline constexpr double kDefaultCPowval = 0.189;
inline constexpr double kDefaultCalibrationTolerance = 0.0025;

struct PrecisionMargin {
  double c_powval = kDefaultCPowval;
};

/// A Monte Carlo estimate and its standard error.
struct Estimate {
  double value = 0.0;
  double mc_se = 0.0;
};

struct ScenarioDescriptor {
  long n = 0;
  double vif = 1.0;
  Structure structure = Structure::PairwiseMain;
  int p = 0;
  double beta_main = 0.0;
  double cohens_d = 0.0;
  double sigma_eps = 0.0;
  std::vector<int> omit{};
};

struct ScenarioResult {
  ScenarioDescriptor scenario;
  int n_sims = 0;
  Estimate coverage;
  Estimate bias;
  Estimate mae;
  Estimate precision_assurance;
  Estimate power_traditional;
  Estimate mean_ci_width;
  Estimate mean_se;
};

inline double cohens_d(double beta_main, double sigma_eps) { return beta_main / sigma_eps; }

inline bool covers(const FitSummary& fit, double beta_true) {
  return fit.ci_low <= beta_true && beta_true <= fit.ci_high;
}

inline bool has_precision_assurance(const FitSummary& fit, double beta_true, PrecisionMargin margin) {
  return beta_true - margin.c_powval <= fit.ci_low && fit.ci_high <= beta_true + margin.c_powval;
}

inline bool has_traditional_power(const FitSummary& fit) { return !(fit.ci_low <= 0.0 && 0.0 <= fit.ci_high); }

inline Estimate proportion_estimate(std::size_t hits, std::size_t n) {
  const double q = static_cast<double>(hits) / static_cast<double>(n);
  return {q, std::sqrt(q * (1.0 - q) / static_cast<double>(n))};
}

inline Estimate mean_estimate(std::span<const double> values) {
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

/// Aggregates fits in the given order. The descriptor is left for the caller.
inline ScenarioResult summarize(std::span<const FitSummary> fits, double beta_true, PrecisionMargin margin) {
  if (fits.empty()) throw std::invalid_argument("summarize needs at least one fit");
  const std::size_t n = fits.size();
  std::size_t covered = 0, assured = 0, powered = 0;
  std::vector<double> err(n), abs_err(n), width(n), se(n);
  for (std::size_t i = 0; i < n; ++i) {
    const FitSummary& f = fits[i];
    covered += covers(f, beta_true);
    assured += has_precision_assurance(f, beta_true, margin);
    powered += has_traditional_power(f);
    err[i] = f.beta_hat - beta_true;
    abs_err[i] = std::abs(err[i]);
    width[i] = f.width();
    se[i] = f.se;
  }
  ScenarioResult r;
  r.n_sims = static_cast<int>(n);
  r.coverage = proportion_estimate(covered, n);
  r.precision_assurance = proportion_estimate(assured, n);
  r.power_traditional = proportion_estimate(powered, n);
  r.bias = mean_estimate(err);
  r.mae = mean_estimate(abs_err);
  r.mean_ci_width = mean_estimate(width);
  r.mean_se = mean_estimate(se);
  return r;
}

inline double precision_assurance_rate(std::span<const FitSummary> fits, double beta_true, double c) {
  std::size_t hits = 0;
  for (const auto& f : fits) hits += has_precision_assurance(f, beta_true, PrecisionMargin{c});
  return static_cast<double>(hits) / static_cast<double>(fits.size());
}

/// Bisection for the smallest margin whose precision assurance reaches
/// target_pa on the given fits. PA(c) is a nondecreasing step function that
/// is 0 at c = 0 and 1 at c = max_i max(beta - ci_low, ci_high - beta).
inline PrecisionMargin calibrate_c_powval(std::span<const FitSummary> fits, double beta_true, double target_pa,
                                          double tol = kDefaultCalibrationTolerance) {
  if (fits.empty()) throw std::invalid_argument("calibration needs at least one fit");
  if (!(target_pa > 0.0 && target_pa < 1.0)) throw DomainError("target precision assurance must lie in (0, 1)");
  double hi = 0.0;
  for (const auto& f : fits) hi = std::max({hi, beta_true - f.ci_low, f.ci_high - beta_true});
  double lo = 0.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (precision_assurance_rate(fits, beta_true, mid) >= target_pa) hi = mid;
    else lo = mid;
  }
  const double pa_hi = precision_assurance_rate(fits, beta_true, hi);
  const double pa_lo = precision_assurance_rate(fits, beta_true, lo);
  if (std::abs(pa_hi - target_pa) <= tol) return {hi};
  if (std::abs(pa_lo - target_pa) <= tol) return {lo};
  throw CalibrationError("precision assurance " + std::to_string(target_pa) + " is not reachable within " +
                             std::to_string(tol) + " on this seed set: c = " + std::to_string(lo) + " gives " +
                             std::to_string(pa_lo) + ", c = " + std::to_string(hi) + " gives " +
                             std::to_string(pa_hi),
                         lo, pa_lo, hi, pa_hi);
}

}  // namespace collinsim
