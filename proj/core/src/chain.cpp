#include "mmrabi/chain.hpp"

#include <cmath>
#include <string>

namespace mmrabi {

ChainMapping build_chain_mapping(int mode_count) {
  if (mode_count < 1) throw ParameterError("mode_count must be >= 1");
  const int m = mode_count;

  Eigen::VectorXd diag(m);
  for (int n = 0; n < m; ++n) diag(n) = double(n + 1);

  // Seed: normalized coupling vector v_n = sqrt(n+1) / rho_0.
  Eigen::VectorXd q(m);
  for (int n = 0; n < m; ++n) q(n) = std::sqrt(double(n + 1));
  const double rho0 = q.norm();
  q /= rho0;

  Eigen::MatrixXd basis(m, m);  // columns are Lanczos vectors
  Eigen::VectorXd alphas(m), betas(std::max(m - 1, 0));

  Eigen::VectorXd prev = Eigen::VectorXd::Zero(m);
  double beta_prev = 0.0;
  for (int i = 0; i < m; ++i) {
    basis.col(i) = q;
    Eigen::VectorXd w = diag.cwiseProduct(q);
    alphas(i) = q.dot(w);
    w -= alphas(i) * q;
    if (i > 0) w -= beta_prev * prev;
    // Full reorthogonalization, two passes of classical Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= i; ++j) {
        w -= basis.col(j).dot(w) * basis.col(j);
      }
    }
    if (i + 1 < m) {
      const double beta = w.norm();
      if (beta < 1e-13 * double(m)) {
        throw PrecisionError("Lanczos breakdown at step " + std::to_string(i) +
                             ": residual norm " + std::to_string(beta));
      }
      betas(i) = beta;
      prev = q;
      q = w / beta;
      beta_prev = beta;
    }
  }

  ChainMapping out;
  out.mode_count = m;
  out.head_coupling_norm = rho0;
  out.site_energies = alphas;
  out.hoppings.resize(std::max(m - 1, 0));
  out.transform.resize(m, m);
  // Gauge b_i -> (-1)^i b_i so every hopping is negative; the diagonal sign
  // similarity leaves the spectrum and the head coupling row untouched.
  for (int i = 0; i < m; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    out.transform.row(i) = sign * basis.col(i).transpose();
  }
  for (int i = 0; i + 1 < m; ++i) out.hoppings(i) = -betas(i);

  out.orthogonality_residual =
      (out.transform * out.transform.transpose() - Eigen::MatrixXd::Identity(m, m))
          .cwiseAbs()
          .maxCoeff();
  if (out.orthogonality_residual > 1e-10) {
    throw PrecisionError("chain mapping lost orthogonality: residual " +
                         std::to_string(out.orthogonality_residual));
  }
  return out;
}

double chain_coefficient_a(int i, int n_top) {
  const double ii = i, nn = n_top;
  return (ii + 2.0) * (ii + 2.0) * (nn - ii) / (2.0 * (ii + 1.0) * (2.0 * ii + 3.0));
}

double chain_coefficient_c(int i, int n_top) {
  const double ii = i, nn = n_top;
  return ii * ii * (ii + 2.0 + nn) / (2.0 * (ii + 1.0) * (2.0 * ii + 1.0));
}

ClosedFormReport verify_against_closed_form(const ChainMapping& mapping) {
  const int m = mapping.mode_count;
  const int n_top = m - 1;
  ClosedFormReport report;
  report.omega_closed.resize(m);
  report.hopping_closed.resize(std::max(m - 1, 0));
  report.rho_ratio.resize(std::max(m - 1, 0));

  for (int i = 0; i < m; ++i) {
    report.omega_closed(i) =
        1.0 + chain_coefficient_a(i, n_top) + chain_coefficient_c(i, n_top);
    const double dev = std::abs(mapping.site_energies(i) - report.omega_closed(i));
    report.max_omega_deviation = std::max(report.max_omega_deviation, dev);
  }
  for (int i = 0; i + 1 < m; ++i) {
    // |t_i| = A_i * rho_{i+1}/rho_i; by symmetry of the Jacobi matrix the
    // same entry equals C_{i+1} * rho_i/rho_{i+1}, hence t_i^2 = A_i C_{i+1}.
    const double a_i = chain_coefficient_a(i, n_top);
    report.hopping_closed(i) = std::sqrt(a_i * chain_coefficient_c(i + 1, n_top));
    report.rho_ratio(i) = std::abs(mapping.hoppings(i)) / a_i;
    const double dev =
        std::abs(std::abs(mapping.hoppings(i)) - report.hopping_closed(i));
    report.max_hopping_deviation = std::max(report.max_hopping_deviation, dev);
  }
  return report;
}

Eigen::MatrixXcd star_correlations(const ChainMapping& mapping,
                                   const Eigen::MatrixXcd& chain_corr) {
  const int m = mapping.mode_count;
  if (chain_corr.rows() != m || chain_corr.cols() != m) {
    throw ParameterError("chain correlation matrix must be M x M");
  }
  return mapping.transform.transpose() * chain_corr * mapping.transform;
}

HamiltonianTerms chain_terms(const ModelParams& params, const ChainMapping& mapping) {
  params.validate();
  if (mapping.mode_count != params.mode_count) {
    throw ParameterError("chain mapping mode count does not match params");
  }
  HamiltonianTerms out;
  out.geometry = Geometry::chain;
  out.site_count = params.mode_count + 1;

  if (params.emitter.is_tls()) {
    out.terms.push_back({{0}, TermOp::emitter_sz, 0.5 * params.omega_x});
  } else {
    out.terms.push_back({{0}, TermOp::emitter_number, params.omega_x});
    if (params.emitter.chi != 0.0)
      out.terms.push_back({{0}, TermOp::emitter_kerr, params.emitter.chi});
  }
  for (int i = 0; i < params.mode_count; ++i) {
    out.terms.push_back(
        {{i + 1}, TermOp::boson_number, mapping.site_energies(i) * params.omega_c});
  }
  for (int i = 0; i + 1 < params.mode_count; ++i) {
    out.terms.push_back(
        {{i + 1, i + 2}, TermOp::hop, mapping.hoppings(i) * params.omega_c});
  }
  if (params.g != 0.0) {
    out.terms.push_back({{0, 1}, TermOp::position_coupling,
                         params.g * mapping.head_coupling_norm});
  }
  return out;
}

}  // namespace mmrabi
