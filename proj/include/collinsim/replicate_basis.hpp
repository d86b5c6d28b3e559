#pragma once

// Factored replicate fits.
//
// With raw standard normals Z (N x p) and unit errors e, every design in a
// scenario family is [1, X_incl] = [1, Z] T_S where T = blockdiag(1, L^T)
// and S selects the intercept plus the fitted predictors. Given the thin QR
// [1, Z] = Q R0 (computed once per (N, p, seed)) the fit of
//     y = [1, Z] T (beta0, beta) + sigma e
// reduces to a (p+1) x (k+1) problem on M = R0 T_S:
//     M = Q2 R2,  w = Q2^T (R0 T (beta0, beta) + sigma Q^T e),
//     coefficients = R2^-1 w[0..k],  RSS = |w[k+1..p]|^2 + sigma^2 |(Q^T e)[p+1..N)|^2.
// Results agree with a direct Householder QR of the materialised design to
// rounding error; tests pin the agreement at 1e-9.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>
#include <string>

#include "collinsim/corrstruct.hpp"
#include "collinsim/datagen.hpp"
#include "collinsim/lsq.hpp"
#include "collinsim/ols.hpp"

namespace collinsim {

struct ReplicateBasis {
  long n = 0;
  Eigen::MatrixXd r;       // (p+1) x (p+1) upper-triangular factor of [1, Z]
  Eigen::VectorXd q_err;   // leading p+1 entries of Q^T e
  double err_rss = 0.0;    // squared norm of the remaining N-p-1 entries of Q^T e
};

/// Streams the replicate's raw design and errors once, accumulating the Gram
/// matrix of [1, Z, e] in row blocks, then R0 = chol([1,Z]^T [1,Z])^T,
/// Q^T e = R0^-T [1,Z]^T e and |e|^2 - |Q^T e|^2. [1, Z] is isotropic
/// (condition number 1 + O(sqrt(p/N))), so the Gram route loses nothing here;
/// collinearity only enters later through the small QR in FactoredModel.
inline ReplicateBasis make_replicate_basis(long n, int p, std::uint64_t seed) {
  if (n < p + 2) throw InsufficientDfError("N must be at least p + 2");
  const int w = p + 2;  // intercept, predictors, error
  NormalStream design(seed, StreamLabel::Design);
  NormalStream error(seed, StreamLabel::Error);
  constexpr long kBlock = 256;
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(w, w);
  Eigen::MatrixXd block(kBlock, w);
  block.col(0).setOnes();
  for (long start = 0; start < n; start += kBlock) {
    const long rows = std::min(kBlock, n - start);
    for (long i = 0; i < rows; ++i) {
      for (int j = 1; j <= p; ++j) block(i, j) = design.next();
      block(i, w - 1) = error.next();
    }
    const auto used = block.topRows(rows);
    total.noalias() += used.transpose() * used;
  }
  const Eigen::MatrixXd gram = total.topLeftCorner(p + 1, p + 1);
  const Eigen::VectorXd cross = total.col(w - 1).head(p + 1);
  const double err_ss = total(w - 1, w - 1);
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw SingularFitError("raw design Gram matrix is not positive definite");
  ReplicateBasis b;
  b.n = n;
  b.r = llt.matrixU();
  for (int j = 0; j <= p; ++j) {
    if (b.r(j, j) <= kRankTolerance * std::sqrt(gram(j, j)))
      throw SingularFitError("raw design is rank deficient at column " + std::to_string(j));
  }
  b.q_err = b.r.transpose().triangularView<Eigen::Lower>().solve(cross);
  b.err_rss = std::max(0.0, err_ss - b.q_err.squaredNorm());
  return b;
}

/// Per-scenario constants for fitting replicates from their bases.
class FactoredModel {
 public:
  FactoredModel(const Scenario& s, const CholeskyFactor& chol)
      : sigma_(s.sigma_eps), tracked_(s.tracked_fit_index()) {
    const int p = s.p();
    const std::vector<int> cols = s.included_columns();
    const int k = static_cast<int>(cols.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(p + 1, p + 1);
    t(0, 0) = 1.0;
    t.bottomRightCorner(p, p) = chol.lower().transpose();
    transform_.resize(p + 1, k + 1);
    transform_.col(0) = t.col(0);
    for (int c = 0; c < k; ++c) transform_.col(c + 1) = t.col(cols[static_cast<std::size_t>(c)] + 1);
    Eigen::VectorXd coef(p + 1);
    coef(0) = s.beta0;
    for (int j = 0; j < p; ++j) coef(j + 1) = s.betas[static_cast<std::size_t>(j)];
    signal_ = t * coef;
    df_ = s.n - k - 1;
    if (df_ < 1) throw InsufficientDfError("no residual degrees of freedom");
    t_crit_ = t_critical(df_);
  }

  long df() const noexcept { return df_; }
  double t_crit() const noexcept { return t_crit_; }

  FitSummary fit(const ReplicateBasis& b) const {
    const Eigen::MatrixXd m = b.r * transform_;
    const Eigen::Index k1 = m.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd r2 = qr.matrixQR().topLeftCorner(k1, k1).triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < k1; ++j) {
      if (std::abs(r2(j, j)) <= kRankTolerance * m.col(j).norm())
        throw SingularFitError("design is rank deficient at column " + std::to_string(j));
    }
    Eigen::VectorXd w = b.r * signal_ + sigma_ * b.q_err;
    w.applyOnTheLeft(qr.householderQ().adjoint());
    Eigen::VectorXd coefficients = r2.triangularView<Eigen::Upper>().solve(w.head(k1));
    const double rss = w.tail(w.size() - k1).squaredNorm() + sigma_ * sigma_ * b.err_rss;
    return summarize_fit(std::move(coefficients), inverse_gram_diagonal(r2), rss, df_, tracked_, t_crit_);
  }

 private:
  double sigma_;
  int tracked_;
  Eigen::MatrixXd transform_;
  Eigen::VectorXd signal_;
  long df_ = 0;
  double t_crit_ = 0.0;
};

}  // namespace collinsim
