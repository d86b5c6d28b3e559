#pragma once

// Correlation structures with a prescribed variance inflation factor.
//
// Two structures are supported:
//   PairwiseMain    only x_main (column 0) and x_1 are correlated, VIF = 1/(1 - r^2)
//   Equicorrelated  every off-diagonal equals r, VIF = 1/(1 - (p-1) r^2 / (1 + (p-2) r))
//
// Tolerances used by the checks in this module are absolute: VIF round trips
// within 1e-9, Cholesky reconstruction within 1e-12 (max-abs entrywise).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "collinsim/errors.hpp"

namespace collinsim {

enum class Structure { PairwiseMain, Equicorrelated };

inline std::string_view to_string(Structure s) {
  return s == Structure::PairwiseMain ? "pairwise" : "equi";
}

inline Structure parse_structure(std::string_view name) {
  if (name == "pairwise" || name == "pairwise-main") return Structure::PairwiseMain;
  if (name == "equi" || name == "equicorrelated") return Structure::Equicorrelated;
  throw ConfigError("unknown structure '" + std::string(name) + "' (expected pairwise|equi)");
}

struct CorrelationSpec {
  Structure structure = Structure::PairwiseMain;
  double target_vif = 1.0;
  int p = 6;

  void validate() const {
    if (!(target_vif >= 1.0)) throw DomainError("target VIF must be >= 1, got " + std::to_string(target_vif));
    if (p < 2) throw DomainError("need at least 2 predictors, got p = " + std::to_string(p));
  }
};

/// Symmetric, unit-diagonal, positive-definite correlation matrix.
class CorrelationMatrix {
 public:
  CorrelationMatrix() = default;
  explicit CorrelationMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols()) throw DomainError("correlation matrix must be square");
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      if (m_(i, i) != 1.0) throw DomainError("correlation matrix needs a unit diagonal");
      for (Eigen::Index j = 0; j < i; ++j) {
        if (m_(i, j) != m_(j, i)) throw DomainError("correlation matrix must be symmetric");
        if (!(std::abs(m_(i, j)) < 1.0)) throw DomainError("off-diagonal correlations must lie in (-1, 1)");
      }
    }
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Eigen::MatrixXd& entries() const noexcept { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Eigen::MatrixXd m_;
};

/// Lower-triangular L with L * L^T equal to the source matrix.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;
  explicit CholeskyFactor(Eigen::MatrixXd lower) : l_(std::move(lower)) {}

  Eigen::Index dim() const noexcept { return l_.rows(); }
  const Eigen::MatrixXd& lower() const noexcept { return l_; }
  Eigen::MatrixXd reconstruct() const { return l_ * l_.transpose(); }

 private:
  Eigen::MatrixXd l_;
};

inline double r_from_vif_pairwise(double target_vif) {
  if (!(target_vif >= 1.0)) throw DomainError("target VIF must be >= 1, got " + std::to_string(target_vif));
  return std::sqrt(1.0 - 1.0 / target_vif);
}

/// Positive root of (p-1) r^2 - R^2 (p-2) r - R^2 = 0 with R^2 = 1 - 1/VIF.
inline double r_from_vif_equicorrelated(double target_vif, int p) {
  if (p < 2) throw DomainError("need at least 2 predictors, got p = " + std::to_string(p));
  if (!(target_vif >= 1.0)) throw DomainError("target VIF must be >= 1, got " + std::to_string(target_vif));
  const double r2 = 1.0 - 1.0 / target_vif;
  const double pm1 = p - 1.0;
  const double pm2 = p - 2.0;
  const double disc = r2 * r2 * pm2 * pm2 + 4.0 * r2 * pm1;
  return (r2 * pm2 + std::sqrt(disc)) / (2.0 * pm1);
}

inline double r_from_vif(const CorrelationSpec& spec) {
  spec.validate();
  return spec.structure == Structure::PairwiseMain ? r_from_vif_pairwise(spec.target_vif)
                                                   : r_from_vif_equicorrelated(spec.target_vif, spec.p);
}

inline double vif_from_r(double r, const CorrelationSpec& spec) {
  if (spec.p < 2) throw DomainError("need at least 2 predictors, got p = " + std::to_string(spec.p));
  if (spec.structure == Structure::PairwiseMain) {
    if (!(std::abs(r) < 1.0)) throw DomainError("pairwise correlation must lie in (-1, 1)");
    return 1.0 / (1.0 - r * r);
  }
  const double lower = -1.0 / (spec.p - 1.0);
  if (!(r > lower && r < 1.0)) {
    throw DomainError("equicorrelation r = " + std::to_string(r) + " outside (" + std::to_string(lower) +
                      ", 1): matrix not positive definite");
  }
  const double r_squared = (spec.p - 1.0) * r * r / (1.0 + (spec.p - 2.0) * r);
  return 1.0 / (1.0 - r_squared);
}

inline CorrelationMatrix build_correlation_matrix(const CorrelationSpec& spec) {
  const double r = r_from_vif(spec);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(spec.p, spec.p);
  if (spec.structure == Structure::PairwiseMain) {
    m(0, 1) = m(1, 0) = r;
  } else {
    for (int i = 0; i < spec.p; ++i)
      for (int j = 0; j < spec.p; ++j)
        if (i != j) m(i, j) = r;
  }
  return CorrelationMatrix(std::move(m));
}

/// Plain column Cholesky; reports the first pivot that is not strictly positive.
inline CholeskyFactor cholesky_lower(const CorrelationMatrix& m) {
  const Eigen::MatrixXd& a = m.entries();
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0)) {
      throw FactorizationError(static_cast<std::size_t>(j),
                               "matrix is not positive definite: pivot " + std::to_string(j) +
                                   " is " + std::to_string(diag));
    }
    l(j, j) = std::sqrt(diag);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return CholeskyFactor(std::move(l));
}

/// VIF targets used throughout the study (82 values, 1 through 50).
inline const std::vector<double>& default_vif_grid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int i = 10; i <= 49; ++i) g.push_back(i / 10.0);
    for (int i = 50; i <= 98; i += 2) g.push_back(i / 10.0);
    for (int v = 10; v <= 20; ++v) g.push_back(v);
    for (int v = 25; v <= 50; v += 5) g.push_back(v);
    return g;
  }();
  return grid;
}

}  // namespace collinsim
