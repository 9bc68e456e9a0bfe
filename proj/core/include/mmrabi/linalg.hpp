#pragma once

#include <Eigen/Dense>

namespace mmrabi::linalg {

/// Rank-truncated SVD with deterministic gauge fixing.
///
/// Singular values are kept in descending order. The truncation discards the
/// smallest values whose combined squared weight stays below
/// relative_cut * sum(sigma^2), then clamps the rank to max_rank (>= 1 value
/// is always kept). Each kept left singular vector is phase-rotated so its
/// largest-magnitude entry is real and positive, which pins the gauge of
/// degenerate subspaces across runs.
struct TruncatedSvd {
  Eigen::MatrixXcd u;          // (m x rank)
  Eigen::VectorXd values;      // (rank)
  Eigen::MatrixXcd v_adjoint;  // (rank x n)
  double discarded_weight = 0.0;  // discarded squared weight / total
  long rank = 0;
};

TruncatedSvd svd_truncate(const Eigen::MatrixXcd& a, long max_rank,
                          double relative_cut);

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending.
void sym_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& eigenvalues,
             Eigen::MatrixXd& eigenvectors);

}  // namespace mmrabi::linalg
