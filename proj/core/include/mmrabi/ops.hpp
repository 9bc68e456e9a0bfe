#pragma once

#include <Eigen/Dense>

#include "mmrabi/model.hpp"

namespace mmrabi::ops {

/// Truncated bosonic annihilation operator, a|n> = sqrt(n)|n-1>.
inline Eigen::MatrixXd annihilation(int dim) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

/// Number operator n = a'a (diagonal).
inline Eigen::MatrixXd number(int dim) {
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) n(k, k) = double(k);
  return n;
}

/// Position-like operator a + a'. For dim = 2 this is sigma_x.
inline Eigen::MatrixXd position(int dim) {
  Eigen::MatrixXd a = annihilation(dim);
  return a + a.transpose().eval();
}

/// Kerr term b'b'bb = n(n-1) (diagonal).
inline Eigen::MatrixXd kerr(int dim) {
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) k(n, n) = double(n) * double(n - 1);
  return k;
}

/// sigma_z in the {|g>, |e>} basis (indices 0, 1).
inline Eigen::MatrixXd sigma_z() {
  Eigen::MatrixXd s(2, 2);
  s << -1.0, 0.0, 0.0, 1.0;
  return s;
}

/// Local emitter Hamiltonian. TLS: (omega_x/2) sigma_z = omega_x (n - 1/2);
/// Kerr: omega_x n + chi n(n-1).
inline Eigen::MatrixXd emitter_hamiltonian(const EmitterKind& kind, int cutoff,
                                           double omega_x) {
  if (kind.is_tls()) {
    return 0.5 * omega_x * sigma_z();
  }
  return omega_x * number(cutoff) + kind.chi * kerr(cutoff);
}

/// Operator through which the emitter couples to the field: sigma_x for a
/// TLS, b + b' for a bosonic emitter. Both are position(dim).
inline Eigen::MatrixXd emitter_coupling(const EmitterKind& kind, int cutoff) {
  return position(kind.is_tls() ? 2 : cutoff);
}

}  // namespace mmrabi::ops
