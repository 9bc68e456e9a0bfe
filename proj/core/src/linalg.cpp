#include "mmrabi/linalg.hpp"

#include <cmath>
#include <stdexcept>

#ifdef MMRABI_USE_LAPACKE
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace mmrabi::linalg {

namespace {

// Full SVD, singular values descending. Returns false if the backend failed
// and the caller should fall back to the robust path.
bool full_svd(const Eigen::MatrixXcd& a, Eigen::MatrixXcd& u, Eigen::VectorXd& s,
              Eigen::MatrixXcd& vh) {
#ifdef MMRABI_USE_LAPACKE
  const lapack_int m = lapack_int(a.rows());
  const lapack_int n = lapack_int(a.cols());
  const lapack_int k = std::min(m, n);
  Eigen::MatrixXcd work = a;  // gesdd destroys its input
  u.resize(m, k);
  s.resize(k);
  vh.resize(k, n);
  const lapack_int info = LAPACKE_zgesdd(
      LAPACK_COL_MAJOR, 'S', m, n, work.data(), m, s.data(), u.data(), m,
      vh.data(), k);
  if (info == 0) return true;
#endif
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u = svd.matrixU();
  s = svd.singularValues();
  vh = svd.matrixV().adjoint();
  return true;
}

}  // namespace

TruncatedSvd svd_truncate(const Eigen::MatrixXcd& a, long max_rank,
                          double relative_cut) {
  Eigen::MatrixXcd u, vh;
  Eigen::VectorXd s;
  full_svd(a, u, s, vh);

  const long k = s.size();
  long double total = 0.0L;
  for (long i = 0; i < k; ++i) total += (long double)s(i) * s(i);

  long rank = k;
  if (total > 0.0L) {
    long double discarded = 0.0L;
    while (rank > 1) {
      const long double w = (long double)s(rank - 1) * s(rank - 1);
      if ((discarded + w) / total > (long double)relative_cut) break;
      discarded += w;
      --rank;
    }
  }
  rank = std::min(rank, std::max(max_rank, 1L));

  TruncatedSvd out;
  out.rank = rank;
  out.u = u.leftCols(rank);
  out.values = s.head(rank);
  out.v_adjoint = vh.topRows(rank);
  long double kept = 0.0L;
  for (long i = 0; i < rank; ++i) kept += (long double)s(i) * s(i);
  out.discarded_weight = total > 0.0L ? double((total - kept) / total) : 0.0;

  // Deterministic gauge: largest-magnitude entry of each left vector made
  // real positive (first index wins ties).
  for (long j = 0; j < rank; ++j) {
    long idx = 0;
    double best = -1.0;
    for (long i = 0; i < out.u.rows(); ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        idx = i;
      }
    }
    if (best > 0.0) {
      const std::complex<double> phase = out.u(idx, j) / best;
      out.u.col(j) *= std::conj(phase);
      out.v_adjoint.row(j) *= phase;
    }
  }
  return out;
}

void sym_eig(const Eigen::MatrixXd& a, Eigen::VectorXd& eigenvalues,
             Eigen::MatrixXd& eigenvectors) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix not square");
#ifdef MMRABI_USE_LAPACKE
  const lapack_int n = lapack_int(a.rows());
  eigenvectors = a;
  eigenvalues.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                         eigenvectors.data(), n, eigenvalues.data());
  if (info == 0) return;
#endif
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  eigenvalues = es.eigenvalues();
  eigenvectors = es.eigenvectors();
}

}  // namespace mmrabi::linalg
