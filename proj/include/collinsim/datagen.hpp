#pragma once

// Replicate generation. For a Scenario and a sim_index the seed is
// seed_base + sim_index; the Design stream supplies the raw N x p
// standard-normal matrix (row-major order, variate i*p + j is row i,
// column j) and the Error stream supplies N unit normals scaled by sigma_eps.
// The raw matrix depends only on (N, p, seed), so it is shared by every VIF
// level, structure, coefficient vector and omission set.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include "collinsim/corrstruct.hpp"
#include "collinsim/errors.hpp"
#include "collinsim/lsq.hpp"
#include "collinsim/philox.hpp"

namespace collinsim {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// sqrt(pi^2 / 3): standard deviation of the standard logistic distribution.
inline constexpr double kDefaultSigmaEps = std::numbers::pi / std::numbers::sqrt3;
inline constexpr double kDefaultIntercept = 10.0;

/// Coefficients (beta_main, beta_1, ...) of the six-predictor model.
inline std::vector<double> six_predictor_betas() { return {2.0, 1.3, 1.5, 6.0, 3.0, 1.0}; }

/// Coefficients (beta_main, beta_1, ..., beta_19) of the twenty-predictor model.
inline std::vector<double> twenty_predictor_betas() {
  return {2.0, 1.3, 1.5, 6.0, 3.0, 1.0, 6.6, 0.7, 3.1, 2.6,
          7.5, 6.9, 9.0, 1.3, 4.5, 0.8, 2.6, 5.3, 0.8, 2.4};
}

inline std::vector<double> default_betas(int p) {
  if (p == 6) return six_predictor_betas();
  if (p == 20) return twenty_predictor_betas();
  throw ConfigError("no coefficient preset for p = " + std::to_string(p) + "; supply betas explicitly");
}

/// Predictor name: 0 -> "x_main", j -> "xj".
inline std::string predictor_name(int index) {
  return index == 0 ? std::string("x_main") : "x" + std::to_string(index);
}

inline int parse_predictor_name(const std::string& name) {
  if (name == "x_main" || name == "xmain") return 0;
  if (name.size() >= 2 && name[0] == 'x' &&
      std::all_of(name.begin() + 1, name.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return std::stoi(name.substr(1));
  }
  throw ConfigError("cannot parse predictor name '" + name + "' (expected x_main or xK)");
}

/// One cell of the experimental grid.
struct Scenario {
  long n = 1000;
  CorrelationSpec spec{};
  double beta0 = kDefaultIntercept;
  std::vector<double> betas = six_predictor_betas();
  int beta_main_index = 0;
  double sigma_eps = kDefaultSigmaEps;
  int n_sims = 1000;
  std::int64_t seed_base = 0;
  std::vector<int> omit{};  // sorted, unique predictor indices dropped before fitting

  int p() const noexcept { return spec.p; }
  double beta_main() const { return betas.at(static_cast<std::size_t>(beta_main_index)); }
  int fitted_predictors() const noexcept { return spec.p - static_cast<int>(omit.size()); }

  std::vector<int> included_columns() const {
    std::vector<int> cols;
    for (int j = 0; j < spec.p; ++j)
      if (!std::binary_search(omit.begin(), omit.end(), j)) cols.push_back(j);
    return cols;
  }

  /// Position of the tracked coefficient among the fitted predictors.
  int tracked_fit_index() const {
    return beta_main_index -
           static_cast<int>(std::lower_bound(omit.begin(), omit.end(), beta_main_index) - omit.begin());
  }

  std::uint64_t seed_for(long sim_index) const noexcept {
    return static_cast<std::uint64_t>(seed_base + sim_index);
  }

  void validate() const {
    spec.validate();
    if (static_cast<int>(betas.size()) != spec.p) {
      throw ScenarioError("coefficient vector has " + std::to_string(betas.size()) + " entries, expected p = " +
                          std::to_string(spec.p));
    }
    if (beta_main_index < 0 || beta_main_index >= spec.p) throw ScenarioError("beta_main_index out of range");
    if (n < spec.p + 2) {
      throw ScenarioError("N = " + std::to_string(n) + " is below p + 2 = " + std::to_string(spec.p + 2));
    }
    if (!(sigma_eps >= 0.0) || !std::isfinite(sigma_eps)) throw ScenarioError("sigma_eps must be finite and >= 0");
    if (n_sims < 1) throw ScenarioError("n_sims must be >= 1");
    if (!std::is_sorted(omit.begin(), omit.end()) || std::adjacent_find(omit.begin(), omit.end()) != omit.end())
      throw ScenarioError("omit set must be sorted and unique");
    for (int j : omit) {
      if (j < 0 || j >= spec.p) throw ScenarioError("omitted predictor index " + std::to_string(j) + " out of range");
      if (j == beta_main_index) throw ScenarioError("cannot omit the tracked predictor");
    }
  }
};

struct Dataset {
  Eigen::MatrixXd x;    // N x p, column 0 is x_main
  Eigen::VectorXd eps;  // N
  Eigen::VectorXd y;    // N
};

/// Stream of standard normals for (seed, label). Thin alias kept for call-site clarity.
inline NormalStream standard_normal_stream(std::uint64_t seed, StreamLabel label) {
  return NormalStream(seed, label);
}

inline RowMatrix raw_design(long n, int p, std::uint64_t seed) {
  RowMatrix z(n, p);
  standard_normal_stream(seed, StreamLabel::Design).fill(std::span<double>(z.data(), static_cast<std::size_t>(z.size())));
  return z;
}

inline Eigen::VectorXd raw_errors(long n, std::uint64_t seed) {
  Eigen::VectorXd e(n);
  standard_normal_stream(seed, StreamLabel::Error).fill(std::span<double>(e.data(), static_cast<std::size_t>(e.size())));
  return e;
}

inline Dataset generate_dataset(const Scenario& s, const CholeskyFactor& chol, long sim_index) {
  if (sim_index < 0 || sim_index >= s.n_sims) throw ScenarioError("sim_index out of range");
  const std::uint64_t seed = s.seed_for(sim_index);
  Dataset d;
  d.x = raw_design(s.n, s.p(), seed) * chol.lower().transpose();
  d.eps = s.sigma_eps * raw_errors(s.n, seed);
  const Eigen::Map<const Eigen::VectorXd> beta(s.betas.data(), s.p());
  d.y = (d.x * beta).array() + s.beta0;
  d.y += d.eps;
  return d;
}

inline Dataset generate_dataset(const Scenario& s, long sim_index) {
  s.validate();
  return generate_dataset(s, cholesky_lower(build_correlation_matrix(s.spec)), sim_index);
}

/// 1 / (1 - R_j^2) from regressing column j (with intercept) on the others.
inline double empirical_vif(const Eigen::MatrixXd& x, Eigen::Index j) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (j < 0 || j >= p) throw std::out_of_range("column index out of range");
  Eigen::MatrixXd aux(n, p);
  aux.col(0).setOnes();
  for (Eigen::Index c = 0, dst = 1; c < p; ++c)
    if (c != j) aux.col(dst++) = x.col(c);
  const Eigen::VectorXd target = x.col(j);
  QrSolution fit;
  try {
    fit = qr_least_squares(aux, target);
  } catch (const SingularFitError& e) {
    throw SingularFitError(std::string("auxiliary regression for VIF is singular (infinite VIF): ") + e.what());
  }
  const double tss = (target.array() - target.mean()).square().sum();
  if (!(fit.rss > kRankTolerance * kRankTolerance * tss)) {
    throw SingularFitError("column " + std::to_string(j) + " is perfectly explained by the others (infinite VIF)");
  }
  return tss / fit.rss;
}

/// Writes one replicate as CSV: x_main, x1, ..., eps, y.
inline void write_dataset_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  const Eigen::Index p = d.x.cols();
  for (Eigen::Index j = 0; j < p; ++j) out << predictor_name(static_cast<int>(j)) << ',';
  out << "eps,y\n";
  out.precision(17);
  for (Eigen::Index i = 0; i < d.x.rows(); ++i) {
    for (Eigen::Index j = 0; j < p; ++j) out << d.x(i, j) << ',';
    out << d.eps(i) << ',' << d.y(i) << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace collinsim
