#include "mmrabi/exact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "mmrabi/linalg.hpp"
#include "mmrabi/ops.hpp"

namespace mmrabi {

FockBasis::FockBasis(std::vector<int> local_dims) : dims_(std::move(local_dims)) {
  if (dims_.empty()) throw ParameterError("FockBasis needs at least one site");
  strides_.resize(dims_.size());
  std::size_t stride = 1;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] < 1) throw ParameterError("local dimension must be >= 1");
    strides_[k] = stride;
    const std::size_t next = stride * std::size_t(dims_[k]);
    if (next / std::size_t(dims_[k]) != stride) {
      throw ResourceError("FockBasis dimension overflows size_t");
    }
    stride = next;
  }
  dimension_ = stride;
}

FockBasis FockBasis::for_params(const ModelParams& params) {
  params.validate();
  std::vector<int> dims(std::size_t(params.mode_count) + 1, params.fock_cutoff);
  dims[0] = params.emitter_cutoff;
  return FockBasis(std::move(dims));
}

std::size_t FockBasis::flatten(const std::vector<int>& occupations) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    idx += strides_[k] * std::size_t(occupations[k]);
  }
  return idx;
}

void FockBasis::unflatten(std::size_t index, std::vector<int>& occupations) const {
  occupations.resize(dims_.size());
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    occupations[k] = int((index / strides_[k]) % std::size_t(dims_[k]));
  }
}

int FockBasis::occupation(std::size_t index, int site) const {
  return int((index / strides_[std::size_t(site)]) % std::size_t(dims_[std::size_t(site)]));
}

namespace {

void check_budget(const FockBasis& basis, std::size_t budget) {
  if (basis.dimension() > budget) {
    throw ResourceError(
        "basis dimension " + std::to_string(basis.dimension()) +
        " exceeds budget " + std::to_string(budget) +
        "; reduce fock_cutoff or mode_count, or raise the budget");
  }
}

}  // namespace

Eigen::SparseMatrix<double> assemble_hamiltonian(const HamiltonianTerms& terms,
                                                 const FockBasis& basis,
                                                 std::size_t dimension_budget) {
  check_budget(basis, dimension_budget);
  if (terms.site_count != basis.site_count()) {
    throw ParameterError("term list site count does not match basis");
  }
  const std::size_t dim = basis.dimension();

  Eigen::VectorXd diagonal = Eigen::VectorXd::Zero(long(dim));
  std::vector<Eigen::Triplet<double>> triplets;

  for (const auto& term : terms.terms) {
    switch (term.op) {
      case TermOp::emitter_sz: {
        for (std::size_t s = 0; s < dim; ++s) {
          const int e = basis.occupation(s, 0);
          diagonal(long(s)) += term.coeff * (e == 0 ? -1.0 : 1.0);
        }
        break;
      }
      case TermOp::emitter_number:
      case TermOp::boson_number: {
        const int site = term.sites.at(0);
        for (std::size_t s = 0; s < dim; ++s) {
          diagonal(long(s)) += term.coeff * basis.occupation(s, site);
        }
        break;
      }
      case TermOp::emitter_kerr: {
        for (std::size_t s = 0; s < dim; ++s) {
          const double n = basis.occupation(s, 0);
          diagonal(long(s)) += term.coeff * n * (n - 1.0);
        }
        break;
      }
      case TermOp::position_coupling: {
        const int a = term.sites.at(0);
        const int b = term.sites.at(1);
        const int da = basis.local_dim(a);
        const int db = basis.local_dim(b);
        std::vector<int> occ;
        for (std::size_t s = 0; s < dim; ++s) {
          basis.unflatten(s, occ);
          const int ka = occ[std::size_t(a)];
          const int kb = occ[std::size_t(b)];
          for (const int ea : {ka - 1, ka + 1}) {
            if (ea < 0 || ea >= da) continue;
            const double amp_a = std::sqrt(double(std::max(ka, ea)));
            for (const int eb : {kb - 1, kb + 1}) {
              if (eb < 0 || eb >= db) continue;
              const double amp_b = std::sqrt(double(std::max(kb, eb)));
              occ[std::size_t(a)] = ea;
              occ[std::size_t(b)] = eb;
              const std::size_t row = basis.flatten(occ);
              occ[std::size_t(a)] = ka;
              occ[std::size_t(b)] = kb;
              triplets.emplace_back(long(row), long(s), term.coeff * amp_a * amp_b);
            }
          }
        }
        break;
      }
      case TermOp::hop: {
        const int a = term.sites.at(0);
        const int b = term.sites.at(1);
        const int da = basis.local_dim(a);
        const int db = basis.local_dim(b);
        std::vector<int> occ;
        for (std::size_t s = 0; s < dim; ++s) {
          basis.unflatten(s, occ);
          const int ka = occ[std::size_t(a)];
          const int kb = occ[std::size_t(b)];
          // b'_a b_b
          if (ka + 1 < da && kb > 0) {
            occ[std::size_t(a)] = ka + 1;
            occ[std::size_t(b)] = kb - 1;
            const std::size_t row = basis.flatten(occ);
            occ[std::size_t(a)] = ka;
            occ[std::size_t(b)] = kb;
            triplets.emplace_back(long(row), long(s),
                                  term.coeff * std::sqrt(double(ka + 1) * double(kb)));
          }
          // b'_b b_a
          if (kb + 1 < db && ka > 0) {
            occ[std::size_t(a)] = ka - 1;
            occ[std::size_t(b)] = kb + 1;
            const std::size_t row = basis.flatten(occ);
            occ[std::size_t(a)] = ka;
            occ[std::size_t(b)] = kb;
            triplets.emplace_back(long(row), long(s),
                                  term.coeff * std::sqrt(double(kb + 1) * double(ka)));
          }
        }
        break;
      }
    }
  }

  for (long s = 0; s < long(dim); ++s) {
    if (diagonal(s) != 0.0) triplets.emplace_back(s, s, diagonal(s));
  }
  Eigen::SparseMatrix<double> h(static_cast<long>(dim), static_cast<long>(dim));
  h.setFromTriplets(triplets.begin(), triplets.end());
  h.makeCompressed();
  return h;
}

Eigen::SparseMatrix<double> assemble_hamiltonian(const ModelParams& params,
                                                 const FockBasis& basis,
                                                 std::size_t dimension_budget) {
  return assemble_hamiltonian(build_terms(params), basis, dimension_budget);
}

namespace {

// <emitter n>, <total photon n>, <parity> for one eigenvector.
struct StateMoments {
  double emitter_n = 0.0;
  double photon_n = 0.0;
  double parity = 0.0;
};

StateMoments moments_of(const Eigen::VectorXd& v, const FockBasis& basis) {
  StateMoments m;
  std::vector<int> occ;
  for (long s = 0; s < v.size(); ++s) {
    const double w = v(s) * v(s);
    if (w == 0.0) continue;
    basis.unflatten(std::size_t(s), occ);
    int total = 0;
    for (int k : occ) total += k;
    m.emitter_n += w * occ[0];
    m.photon_n += w * (total - occ[0]);
    m.parity += w * ((total % 2 == 0) ? 1.0 : -1.0);
  }
  return m;
}

SpectrumResult finalize_levels(Eigen::VectorXd energies, Eigen::MatrixXd vectors,
                               const FockBasis& basis, int k_levels) {
  const int k = std::min<int>(k_levels, int(energies.size()));
  std::vector<int> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), 0);

  std::vector<StateMoments> mom(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) mom[std::size_t(i)] = moments_of(vectors.col(i), basis);

  // Stable reorder inside near-degenerate clusters for deterministic output.
  const double scale = std::max(1.0, energies.cwiseAbs().maxCoeff());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (std::abs(energies(a) - energies(b)) > 1e-9 * scale) {
      return energies(a) < energies(b);
    }
    const auto& ma = mom[std::size_t(a)];
    const auto& mb = mom[std::size_t(b)];
    if (std::abs(ma.emitter_n - mb.emitter_n) > 1e-9) return ma.emitter_n < mb.emitter_n;
    return ma.photon_n < mb.photon_n - 1e-9;
  });

  SpectrumResult out;
  out.energies.resize(k);
  out.gaps.resize(k);
  out.parity.resize(std::size_t(k));
  for (int i = 0; i < k; ++i) {
    const int j = order[std::size_t(i)];
    out.energies(i) = energies(j);
    const double p = mom[std::size_t(j)].parity;
    out.parity[std::size_t(i)] = (p > 0.99) ? 1 : (p < -0.99 ? -1 : 0);
  }
  for (int i = 0; i < k; ++i) out.gaps(i) = out.energies(i) - out.energies(0);
  return out;
}

// Lanczos with full reorthogonalization for the lowest Ritz values of a
// large sparse symmetric matrix. Deterministic start vector.
void lanczos_lowest(const Eigen::SparseMatrix<double>& h, int k_levels,
                    Eigen::VectorXd& energies, Eigen::MatrixXd& vectors) {
  const long dim = h.rows();
  const int max_iter = int(std::min<long>(dim, std::max(24L * k_levels, 600L)));

  std::mt19937 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd q(dim);
  for (long i = 0; i < dim; ++i) q(i) = gauss(rng);
  q.normalize();

  Eigen::MatrixXd basis(dim, max_iter);
  std::vector<double> alpha, beta;
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim);
  double beta_prev = 0.0;

  // Ritz residual |beta_m * (last component)| drives the stopping rule.
  auto tridiag_eigen = [&](int m, Eigen::VectorXd& ev, Eigen::MatrixXd& evec) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) t(j, j) = alpha[std::size_t(j)];
    for (int j = 0; j + 1 < m; ++j) t(j, j + 1) = t(j + 1, j) = beta[std::size_t(j)];
    linalg::sym_eig(t, ev, evec);
  };

  int iters = 0;
  double final_b = 0.0;
  for (int i = 0; i < max_iter; ++i) {
    basis.col(i) = q;
    Eigen::VectorXd w = h * q;
    alpha.push_back(q.dot(w));
    w -= alpha.back() * q;
    if (i > 0) w -= beta_prev * prev;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= i; ++j) w -= basis.col(j).dot(w) * basis.col(j);
    }
    const double b = w.norm();
    iters = i + 1;
    final_b = b;
    if (b < 1e-12) break;  // invariant subspace found
    if (iters >= 2 * k_levels && iters % 10 == 0) {
      Eigen::VectorXd ev;
      Eigen::MatrixXd evec;
      tridiag_eigen(iters, ev, evec);
      double worst = 0.0;
      for (int j = 0; j < std::min(k_levels, iters); ++j) {
        worst = std::max(worst, std::abs(b * evec(iters - 1, j)));
      }
      if (worst < 1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff())) break;
    }
    beta.push_back(b);
    prev = q;
    q = w / b;
    beta_prev = b;
  }

  Eigen::VectorXd ev;
  Eigen::MatrixXd evec;
  tridiag_eigen(iters, ev, evec);
  if (ev.size() < k_levels) {
    throw ConvergenceError("Lanczos spectrum solver produced too few Ritz values");
  }
  for (int j = 0; j < k_levels; ++j) {
    const double resid = std::abs(final_b * evec(iters - 1, j));
    if (resid > 1e-7 * std::max(1.0, std::abs(ev(j)))) {
      throw ConvergenceError(
          "Lanczos spectrum solver did not converge: level " + std::to_string(j) +
          " residual " + std::to_string(resid),
          {ev.data(), ev.data() + std::min<long>(ev.size(), k_levels)});
    }
  }
  energies = ev.head(k_levels);
  vectors = basis.leftCols(iters) * evec.leftCols(k_levels);
}

}  // namespace

SpectrumResult lowest_levels(const Eigen::SparseMatrix<double>& hamiltonian,
                             const FockBasis& basis, int k_levels) {
  if (k_levels < 2) throw ParameterError("k_levels must be >= 2");
  const long dim = hamiltonian.rows();
  if (long(basis.dimension()) != dim) {
    throw ParameterError("basis dimension does not match Hamiltonian");
  }
  if (k_levels > dim) k_levels = int(dim);

  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
  if (std::size_t(dim) <= dense_solver_threshold) {
    Eigen::MatrixXd dense(hamiltonian);
    linalg::sym_eig(dense, energies, vectors);
  } else {
    lanczos_lowest(hamiltonian, k_levels, energies, vectors);
  }
  return finalize_levels(std::move(energies), std::move(vectors), basis, k_levels);
}

std::vector<SpectrumResult> spectrum_sweep(const ModelParams& params,
                                           const std::vector<double>& g_grid,
                                           int k_levels) {
  std::vector<SpectrumResult> out(g_grid.size());
  const FockBasis basis = FockBasis::for_params(params);
  for (std::size_t i = 0; i < g_grid.size(); ++i) {
    ModelParams p = params;
    p.g = g_grid[i];
    out[i] = lowest_levels(assemble_hamiltonian(p, basis), basis, k_levels);
    out[i].g = g_grid[i];
  }
  return out;
}

Eigen::VectorXcd product_state_vector(const FockBasis& basis,
                                      const Eigen::VectorXcd& emitter_amplitudes) {
  if (emitter_amplitudes.size() != basis.local_dim(0)) {
    throw ParameterError("emitter state dimension does not match basis");
  }
  const double norm = emitter_amplitudes.norm();
  if (norm < 1e-14) throw ParameterError("emitter state must be nonzero");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(long(basis.dimension()));
  std::vector<int> occ(std::size_t(basis.site_count()), 0);
  for (int e = 0; e < basis.local_dim(0); ++e) {
    occ[0] = e;
    psi(long(basis.flatten(occ))) = emitter_amplitudes(e) / norm;
  }
  return psi;
}

namespace {

// One Lanczos-Krylov step psi -> exp(-i H dt) psi.
void krylov_step(const Eigen::SparseMatrix<double>& h, Eigen::VectorXcd& psi,
                 double dt, int m) {
  const long dim = psi.size();
  m = int(std::min<long>(m, dim));
  Eigen::MatrixXcd basis(dim, m);
  Eigen::VectorXd alpha(m), beta(std::max(m - 1, 0));

  Eigen::VectorXcd q = psi / psi.norm();
  Eigen::VectorXcd prev = Eigen::VectorXcd::Zero(dim);
  double beta_prev = 0.0;
  int built = 0;
  for (int i = 0; i < m; ++i) {
    basis.col(i) = q;
    Eigen::VectorXcd w = h * q;
    alpha(i) = q.dot(w).real();
    w -= alpha(i) * q;
    if (i > 0) w -= beta_prev * prev;
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= i; ++j) w -= basis.col(j).dot(w) * basis.col(j);
    }
    built = i + 1;
    if (i + 1 < m) {
      const double b = w.norm();
      if (b < 1e-14) break;
      beta(i) = b;
      prev = q;
      q = w / b;
      beta_prev = b;
    }
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) t(j, j) = alpha(j);
  for (int j = 0; j + 1 < built; ++j) t(j, j + 1) = t(j + 1, j) = beta(j);
  Eigen::VectorXd ev;
  Eigen::MatrixXd evec;
  linalg::sym_eig(t, ev, evec);

  Eigen::VectorXcd coeffs(built);
  const std::complex<double> minus_i(0.0, -1.0);
  for (int j = 0; j < built; ++j) {
    std::complex<double> acc = 0.0;
    for (int l = 0; l < built; ++l) {
      acc += evec(j, l) * std::exp(minus_i * ev(l) * dt) * evec(0, l);
    }
    coeffs(j) = acc;
  }
  psi = psi.norm() * (basis.leftCols(built) * coeffs);
}

}  // namespace

ExactEvolution evolve_exact(const Eigen::SparseMatrix<double>& hamiltonian,
                            const FockBasis& basis, const Eigen::VectorXcd& psi0,
                            const std::vector<double>& t_grid, bool keep_states) {
  const long dim = hamiltonian.rows();
  if (psi0.size() != dim) throw ParameterError("initial state dimension mismatch");

  ExactEvolution out;
  out.times = t_grid;

  auto measure = [&](const Eigen::VectorXcd& psi) {
    double emitter = 0.0;
    Eigen::VectorXd photons = Eigen::VectorXd::Zero(basis.site_count() - 1);
    for (long s = 0; s < dim; ++s) {
      const double w = std::norm(psi(s));
      if (w == 0.0) continue;
      emitter += w * basis.occupation(std::size_t(s), 0);
      for (int site = 1; site < basis.site_count(); ++site) {
        photons(site - 1) += w * basis.occupation(std::size_t(s), site);
      }
    }
    out.emitter_population.push_back(emitter);
    out.site_occupations.push_back(std::move(photons));
    out.norms.push_back(psi.norm());
    out.energies.push_back(psi.dot(hamiltonian * psi).real());
    if (keep_states) out.states.push_back(psi);
  };

  if (std::size_t(dim) <= dense_solver_threshold) {
    Eigen::MatrixXd dense(hamiltonian);
    Eigen::VectorXd ev;
    Eigen::MatrixXd evec;
    linalg::sym_eig(dense, ev, evec);
    const Eigen::VectorXcd coeffs = evec.transpose() * psi0;
    const std::complex<double> minus_i(0.0, -1.0);
    for (double t : t_grid) {
      Eigen::VectorXcd phases(dim);
      for (long j = 0; j < dim; ++j) phases(j) = std::exp(minus_i * ev(j) * t);
      const Eigen::VectorXcd psi = evec * phases.cwiseProduct(coeffs);
      measure(psi);
    }
  } else {
    Eigen::VectorXcd psi = psi0;
    double t_now = 0.0;
    for (double t : t_grid) {
      double remaining = t - t_now;
      const double h_step = 0.1;  // conservative Krylov substep
      while (std::abs(remaining) > 1e-14) {
        const double dt = std::clamp(remaining, -h_step, h_step);
        krylov_step(hamiltonian, psi, dt, 48);
        remaining -= dt;
      }
      t_now = t;
      measure(psi);
    }
  }
  return out;
}

}  // namespace mmrabi
