#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "collinsim/errors.hpp"

namespace collinsim {

/// Least-squares solution via Householder QR with a column-wise rank check.
struct QrSolution {
  Eigen::VectorXd coefficients;
  Eigen::MatrixXd r;          // k x k upper triangular factor
  Eigen::VectorXd residuals;
  double rss = 0.0;
};

/// A column is declared dependent when its remainder after projection onto
/// the preceding columns is below this fraction of its own norm.
inline constexpr double kRankTolerance = 1e-10;

inline QrSolution qr_least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& y) {
  if (a.rows() != y.size()) throw std::invalid_argument("design and response lengths differ");
  if (a.rows() < a.cols()) throw InsufficientDfError("fewer observations than columns");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  const Eigen::Index k = a.cols();
  QrSolution out;
  out.r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double col_norm = a.col(j).norm();
    if (col_norm == 0.0 || std::abs(out.r(j, j)) <= kRankTolerance * col_norm) {
      throw SingularFitError("design is rank deficient at column " + std::to_string(j));
    }
  }
  Eigen::VectorXd qty = y;
  qty.applyOnTheLeft(qr.householderQ().adjoint());
  out.coefficients = out.r.triangularView<Eigen::Upper>().solve(qty.head(k));
  out.residuals = y - a * out.coefficients;
  out.rss = out.residuals.squaredNorm();
  return out;
}

/// Diagonal of (R^T R)^{-1} = R^{-1} R^{-T} for an upper-triangular R.
inline Eigen::VectorXd inverse_gram_diagonal(const Eigen::MatrixXd& r) {
  const Eigen::Index k = r.rows();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  return r_inv.rowwise().squaredNorm();
}

}  // namespace collinsim
