#pragma once

#include <Eigen/Dense>

#include "mmrabi/model.hpp"

namespace mmrabi {

/// Orthogonal rotation of the star modes into a nearest-neighbour chain.
///
/// The chain operators are b_i = sum_n U(i,n) a_n. The chain Hamiltonian of
/// the field is tridiagonal with on-site energies omega_i and hoppings t_i,
/// and the emitter couples only to chain site 0 with strength g * rho_0.
/// All energies are in units of omega_c.
struct ChainMapping {
  int mode_count = 0;
  Eigen::MatrixXd transform;       // U(i, n)
  Eigen::VectorXd site_energies;   // omega_i, size M
  Eigen::VectorXd hoppings;        // t_i <= 0, size M-1
  double head_coupling_norm = 1.0; // rho_0 = sqrt(M(M+1)/2)
  double orthogonality_residual = 0.0;  // max |U U^T - I|
};

/// Builds the mapping by Lanczos tridiagonalization (full reorthogonalization)
/// of diag(1..M) seeded with the normalized coupling vector v_n ~ sqrt(n+1).
/// Hopping signs are gauged to t_i <= 0.
ChainMapping build_chain_mapping(int mode_count);

/// Elementwise comparison of the numerically generated chain coefficients
/// against the closed-form recurrence coefficients of the underlying
/// (Hahn-class) orthogonal polynomials. Mismatches are reported, not thrown.
struct ClosedFormReport {
  Eigen::VectorXd omega_closed;    // 1 + A_i + C_i
  Eigen::VectorXd hopping_closed;  // sqrt(A_i * C_{i+1})
  Eigen::VectorXd rho_ratio;       // rho_{i+1}/rho_i = |t_i| / A_i (numeric)
  double max_omega_deviation = 0.0;
  double max_hopping_deviation = 0.0;
};

ClosedFormReport verify_against_closed_form(const ChainMapping& mapping);

/// Down/up recurrence coefficients of the chain polynomials, with N = M - 1.
double chain_coefficient_a(int i, int n_top);
double chain_coefficient_c(int i, int n_top);

/// Rotates a chain-basis correlation matrix <b_i' b_j> back to the star
/// basis: <a_n' a_m> = U^T C U. Hermiticity and trace are preserved.
Eigen::MatrixXcd star_correlations(const ChainMapping& mapping,
                                   const Eigen::MatrixXcd& chain_corr);

/// Term list of the full model in the chain geometry (emitter + M chain
/// sites, nearest-neighbour couplings only).
HamiltonianTerms chain_terms(const ModelParams& params, const ChainMapping& mapping);

}  // namespace mmrabi
