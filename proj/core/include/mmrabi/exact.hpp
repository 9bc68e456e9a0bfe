#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "mmrabi/model.hpp"

namespace mmrabi {

/// Truncated Fock basis over [emitter, photon sites...]. Site 0 varies
/// fastest in the flat index; the codec is a bijection between occupation
/// multi-indices and flat indices.
class FockBasis {
 public:
  explicit FockBasis(std::vector<int> local_dims);
  static FockBasis for_params(const ModelParams& params);

  std::size_t dimension() const { return dimension_; }
  int site_count() const { return int(dims_.size()); }
  int local_dim(int site) const { return dims_.at(std::size_t(site)); }
  const std::vector<int>& local_dims() const { return dims_; }

  std::size_t flatten(const std::vector<int>& occupations) const;
  void unflatten(std::size_t index, std::vector<int>& occupations) const;
  /// Occupation of one site for a flat index, without building the full
  /// multi-index.
  int occupation(std::size_t index, int site) const;

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 0;
};

inline constexpr std::size_t default_dimension_budget = 500000;
inline constexpr std::size_t dense_solver_threshold = 4096;

/// Sparse, real-symmetric Hamiltonian assembled from a term list. Throws
/// ResourceError (with suggested reductions) when the basis dimension
/// exceeds the budget.
Eigen::SparseMatrix<double> assemble_hamiltonian(
    const HamiltonianTerms& terms, const FockBasis& basis,
    std::size_t dimension_budget = default_dimension_budget);

/// Star-geometry assembly directly from model parameters.
Eigen::SparseMatrix<double> assemble_hamiltonian(
    const ModelParams& params, const FockBasis& basis,
    std::size_t dimension_budget = default_dimension_budget);

/// Lowest part of a spectrum. Energies ascending; gaps are relative to the
/// ground state. Near-degenerate levels (within 1e-9 * scale) are ordered by
/// ascending emitter excitation then total photon number, so CSV output is
/// deterministic. Parity labels are +-1 where the eigenstate has a definite
/// excitation-number parity, 0 otherwise.
struct SpectrumResult {
  double g = 0.0;
  Eigen::VectorXd energies;
  Eigen::VectorXd gaps;
  std::vector<int> parity;
};

SpectrumResult lowest_levels(const Eigen::SparseMatrix<double>& hamiltonian,
                             const FockBasis& basis, int k_levels);

/// Lowest k_levels per coupling value; all other parameters fixed.
std::vector<SpectrumResult> spectrum_sweep(const ModelParams& params,
                                           const std::vector<double>& g_grid,
                                           int k_levels);

/// Product state |emitter> x |0...0> as a dense vector.
Eigen::VectorXcd product_state_vector(const FockBasis& basis,
                                      const Eigen::VectorXcd& emitter_amplitudes);

/// Unitary evolution of a dense state vector, sampled on t_grid.
/// Uses one full eigendecomposition below the dense threshold and a
/// Lanczos-Krylov stepper above it.
struct ExactEvolution {
  std::vector<double> times;
  std::vector<double> emitter_population;            // emitter excitation number
  std::vector<Eigen::VectorXd> site_occupations;     // photon sites, per sample
  std::vector<double> norms;
  std::vector<double> energies;
  std::vector<Eigen::VectorXcd> states;              // kept only if requested
};

ExactEvolution evolve_exact(const Eigen::SparseMatrix<double>& hamiltonian,
                            const FockBasis& basis, const Eigen::VectorXcd& psi0,
                            const std::vector<double>& t_grid,
                            bool keep_states = false);

}  // namespace mmrabi
