#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

namespace test_support {

/// Deterministic random Hermitian matrix.
inline Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = {gauss(rng), gauss(rng)};
  }
  return 0.5 * (a + a.adjoint()).eval();
}

inline std::vector<double> uniform_grid(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[std::size_t(i)] = lo + (hi - lo) * i / (count - 1);
  return out;
}

}  // namespace test_support
