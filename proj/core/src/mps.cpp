#include "mmrabi/mps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include <unsupported/Eigen/KroneckerProduct>

#include "mmrabi/linalg.hpp"
#include "mmrabi/ops.hpp"

namespace mmrabi {

// ---------------------------------------------------------------------------
// MpsState
// ---------------------------------------------------------------------------

MpsState MpsState::product_state(const std::vector<int>& local_dims,
                                 const std::vector<Eigen::VectorXcd>& site_states) {
  if (local_dims.empty() || local_dims.size() != site_states.size()) {
    throw ParameterError("product_state: dims and site states must match");
  }
  MpsState out;
  out.sites_.resize(local_dims.size());
  for (std::size_t k = 0; k < local_dims.size(); ++k) {
    const int d = local_dims[k];
    const Eigen::VectorXcd& v = site_states[k];
    if (v.size() != d) throw ParameterError("product_state: site state dimension mismatch");
    const double nrm = v.norm();
    if (nrm < 1e-14) throw ParameterError("product_state: site state must be nonzero");
    auto& tensor = out.sites_[k];
    tensor.blocks.resize(std::size_t(d));
    for (int s = 0; s < d; ++s) {
      tensor.blocks[std::size_t(s)] = Eigen::MatrixXcd::Constant(1, 1, v(s) / nrm);
    }
  }
  out.center_ = 0;
  return out;
}

long MpsState::bond_dim(int bond) const {
  return sites_[std::size_t(bond)].right_dim();
}

long MpsState::max_bond_dim() const {
  long best = 1;
  for (int b = 0; b + 1 < site_count(); ++b) best = std::max(best, bond_dim(b));
  return best;
}

void MpsState::left_normalize_site(int site) {
  SiteTensor& a = sites_[std::size_t(site)];
  const int d = a.phys();
  const long chi_l = a.left_dim();
  const long chi_r = a.right_dim();

  Eigen::MatrixXcd stacked(d * chi_l, chi_r);
  for (int s = 0; s < d; ++s) stacked.block(s * chi_l, 0, chi_l, chi_r) = a.blocks[std::size_t(s)];

  const long r = std::min<long>(d * chi_l, chi_r);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(d * chi_l, r);
  Eigen::MatrixXcd rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
  // Deterministic gauge: real nonnegative diagonal of R.
  for (long i = 0; i < r; ++i) {
    const double mag = std::abs(rmat(i, i));
    if (mag > 0.0) {
      const std::complex<double> phase = rmat(i, i) / mag;
      rmat.row(i) *= std::conj(phase);
      q.col(i) *= phase;
    }
  }

  for (int s = 0; s < d; ++s) a.blocks[std::size_t(s)] = q.block(s * chi_l, 0, chi_l, r);
  SiteTensor& next = sites_[std::size_t(site) + 1];
  for (auto& block : next.blocks) block = rmat * block;
}

void MpsState::right_normalize_site(int site) {
  SiteTensor& a = sites_[std::size_t(site)];
  const int d = a.phys();
  const long chi_l = a.left_dim();
  const long chi_r = a.right_dim();

  Eigen::MatrixXcd stacked(chi_l, d * chi_r);
  for (int s = 0; s < d; ++s) stacked.block(0, s * chi_r, chi_l, chi_r) = a.blocks[std::size_t(s)];

  const long r = std::min<long>(chi_l, d * chi_r);
  // LQ via QR of the adjoint: N = L Q with orthonormal rows of Q.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(stacked.adjoint());
  Eigen::MatrixXcd q = (qr.householderQ() * Eigen::MatrixXcd::Identity(d * chi_r, r)).adjoint();
  Eigen::MatrixXcd lmat =
      Eigen::MatrixXcd(qr.matrixQR().topRows(r).triangularView<Eigen::Upper>()).adjoint();
  for (long i = 0; i < r; ++i) {
    const double mag = std::abs(lmat(i, i));
    if (mag > 0.0) {
      const std::complex<double> phase = lmat(i, i) / mag;
      lmat.col(i) *= std::conj(phase);
      q.row(i) *= phase;
    }
  }

  for (int s = 0; s < d; ++s) a.blocks[std::size_t(s)] = q.block(0, s * chi_r, r, chi_r);
  SiteTensor& prev = sites_[std::size_t(site) - 1];
  for (auto& block : prev.blocks) block = block * lmat;
}

void MpsState::gauge_to(int site) {
  if (site < 0 || site >= site_count()) throw ParameterError("gauge_to: site out of range");
  while (center_ < site) {
    left_normalize_site(center_);
    ++center_;
  }
  while (center_ > site) {
    right_normalize_site(center_);
    --center_;
  }
}

double MpsState::norm() {
  const SiteTensor& c = sites_[std::size_t(center_)];
  long double acc = 0.0L;
  for (const auto& block : c.blocks) acc += (long double)block.squaredNorm();
  return std::sqrt(double(acc));
}

void MpsState::normalize() {
  const double n = norm();
  if (n < 1e-300) throw PrecisionError("cannot normalize a zero state");
  for (auto& block : sites_[std::size_t(center_)].blocks) block /= n;
}

bool MpsState::is_normalized(double tol) { return std::abs(norm() - 1.0) <= tol; }

double MpsState::apply_two_site_gate(int bond, const Eigen::MatrixXcd& gate,
                                     int chi_max, double svd_cut, bool move_right) {
  if (bond < 0 || bond + 1 >= site_count()) throw ParameterError("gate bond out of range");
  if (center_ != bond && center_ != bond + 1) gauge_to(bond);

  SiteTensor& a = sites_[std::size_t(bond)];
  SiteTensor& b = sites_[std::size_t(bond) + 1];
  const int d1 = a.phys();
  const int d2 = b.phys();
  const long chi_l = a.left_dim();
  const long chi_r = b.right_dim();
  if (gate.rows() != d1 * d2 || gate.cols() != d1 * d2) {
    throw ParameterError("gate dimension does not match bond");
  }

  // theta[(s1 s2)] = A[s1] B[s2], flattened into columns for the gate mix.
  Eigen::MatrixXcd tmat(chi_l * chi_r, d1 * d2);
  for (int s1 = 0; s1 < d1; ++s1) {
    for (int s2 = 0; s2 < d2; ++s2) {
      const Eigen::MatrixXcd theta = a.blocks[std::size_t(s1)] * b.blocks[std::size_t(s2)];
      tmat.col(s1 * d2 + s2) = Eigen::Map<const Eigen::VectorXcd>(theta.data(), chi_l * chi_r);
    }
  }
  tmat = tmat * gate.transpose();

  Eigen::MatrixXcd big(d1 * chi_l, d2 * chi_r);
  for (int s1 = 0; s1 < d1; ++s1) {
    for (int s2 = 0; s2 < d2; ++s2) {
      big.block(s1 * chi_l, s2 * chi_r, chi_l, chi_r) =
          Eigen::Map<const Eigen::MatrixXcd>(tmat.col(s1 * d2 + s2).data(), chi_l, chi_r);
    }
  }

  // Per-application budget is half the configured cut: each discard stays
  // within svd_cut while the cumulative loss over a default-length run
  // remains inside the 1e-6 norm-drift bound.
  const auto svd = linalg::svd_truncate(big, chi_max, 0.5 * svd_cut);
  discarded_ += svd.discarded_weight;
  const long rank = svd.rank;

  a.blocks.assign(std::size_t(d1), Eigen::MatrixXcd());
  b.blocks.assign(std::size_t(d2), Eigen::MatrixXcd());
  if (move_right) {
    const Eigen::MatrixXcd sv = svd.values.asDiagonal() * svd.v_adjoint;
    for (int s1 = 0; s1 < d1; ++s1) a.blocks[std::size_t(s1)] = svd.u.block(s1 * chi_l, 0, chi_l, rank);
    for (int s2 = 0; s2 < d2; ++s2) b.blocks[std::size_t(s2)] = sv.block(0, s2 * chi_r, rank, chi_r);
    center_ = bond + 1;
  } else {
    const Eigen::MatrixXcd us = svd.u * svd.values.asDiagonal();
    for (int s1 = 0; s1 < d1; ++s1) a.blocks[std::size_t(s1)] = us.block(s1 * chi_l, 0, chi_l, rank);
    for (int s2 = 0; s2 < d2; ++s2) b.blocks[std::size_t(s2)] = svd.v_adjoint.block(0, s2 * chi_r, rank, chi_r);
    center_ = bond;
  }
  return svd.discarded_weight;
}

std::complex<double> MpsState::expect_site(int site, const Eigen::MatrixXcd& op) {
  if (site < 0 || site >= site_count()) throw ParameterError("expect_site: site out of range");
  const int d = physical_dim(site);
  if (op.rows() != d || op.cols() != d) throw ParameterError("expect_site: operator dimension mismatch");
  gauge_to(site);
  const SiteTensor& a = sites_[std::size_t(site)];
  std::complex<double> acc = 0.0;
  double nrm2 = 0.0;
  for (int s = 0; s < d; ++s) nrm2 += a.blocks[std::size_t(s)].squaredNorm();
  for (int sp = 0; sp < d; ++sp) {
    for (int s = 0; s < d; ++s) {
      if (op(sp, s) == 0.0) continue;
      acc += op(sp, s) * (a.blocks[std::size_t(sp)].conjugate().cwiseProduct(a.blocks[std::size_t(s)])).sum();
    }
  }
  return acc / nrm2;
}

std::complex<double> MpsState::expect_two_site(int bond, const Eigen::MatrixXcd& op) {
  if (bond < 0 || bond + 1 >= site_count()) throw ParameterError("expect_two_site: bond out of range");
  if (center_ != bond && center_ != bond + 1) gauge_to(bond);
  const SiteTensor& a = sites_[std::size_t(bond)];
  const SiteTensor& b = sites_[std::size_t(bond) + 1];
  const int d1 = a.phys();
  const int d2 = b.phys();
  if (op.rows() != d1 * d2 || op.cols() != d1 * d2) {
    throw ParameterError("expect_two_site: operator dimension mismatch");
  }

  std::vector<Eigen::MatrixXcd> theta(static_cast<std::size_t>(d1 * d2));
  double nrm2 = 0.0;
  for (int s1 = 0; s1 < d1; ++s1) {
    for (int s2 = 0; s2 < d2; ++s2) {
      theta[std::size_t(s1 * d2 + s2)] = a.blocks[std::size_t(s1)] * b.blocks[std::size_t(s2)];
      nrm2 += theta[std::size_t(s1 * d2 + s2)].squaredNorm();
    }
  }
  std::complex<double> acc = 0.0;
  for (int p = 0; p < d1 * d2; ++p) {
    for (int q = 0; q < d1 * d2; ++q) {
      if (op(p, q) == 0.0) continue;
      acc += op(p, q) * (theta[std::size_t(p)].conjugate().cwiseProduct(theta[std::size_t(q)])).sum();
    }
  }
  return acc / nrm2;
}

Eigen::MatrixXcd MpsState::correlation_matrix(int first, int count,
                                              const Eigen::MatrixXcd& annihilator) {
  if (first < 0 || first + count > site_count() || count < 1) {
    throw ParameterError("correlation_matrix: site range out of bounds");
  }
  const Eigen::MatrixXcd creator = annihilator.adjoint();
  const Eigen::MatrixXcd number_op = creator * annihilator;
  Eigen::MatrixXcd corr = Eigen::MatrixXcd::Zero(count, count);

  for (int i = 0; i < count; ++i) {
    const int site_i = first + i;
    gauge_to(site_i);
    const double nrm2 = norm() * norm();
    corr(i, i) = expect_site(site_i, number_op);

    // Left-to-right transfer with b' inserted at site i.
    const SiteTensor& ai = sites_[std::size_t(site_i)];
    const int d = ai.phys();
    Eigen::MatrixXcd env = Eigen::MatrixXcd::Zero(ai.right_dim(), ai.right_dim());
    for (int sp = 0; sp < d; ++sp) {
      for (int s = 0; s < d; ++s) {
        if (creator(sp, s) == 0.0) continue;
        env += creator(sp, s) * (ai.blocks[std::size_t(sp)].adjoint() * ai.blocks[std::size_t(s)]);
      }
    }
    for (int j = i + 1; j < count; ++j) {
      const int site_j = first + j;
      const SiteTensor& aj = sites_[std::size_t(site_j)];
      const int dj = aj.phys();
      // Close with b at site j (right side is right-canonical).
      std::complex<double> val = 0.0;
      for (int sp = 0; sp < dj; ++sp) {
        for (int s = 0; s < dj; ++s) {
          if (annihilator(sp, s) == 0.0) continue;
          val += annihilator(sp, s) *
                 (aj.blocks[std::size_t(sp)].adjoint() * env * aj.blocks[std::size_t(s)]).trace();
        }
      }
      corr(i, j) = val / nrm2;
      corr(j, i) = std::conj(corr(i, j));
      if (j + 1 < count) {
        Eigen::MatrixXcd next = Eigen::MatrixXcd::Zero(aj.right_dim(), aj.right_dim());
        for (int s = 0; s < dj; ++s) {
          next += aj.blocks[std::size_t(s)].adjoint() * env * aj.blocks[std::size_t(s)];
        }
        env = std::move(next);
      }
    }
  }
  return corr;
}

Eigen::VectorXd MpsState::schmidt_values(int bond) {
  if (bond < 0 || bond + 1 >= site_count()) throw ParameterError("schmidt_values: bond out of range");
  gauge_to(bond);
  const SiteTensor& a = sites_[std::size_t(bond)];
  const int d = a.phys();
  const long chi_l = a.left_dim();
  const long chi_r = a.right_dim();
  Eigen::MatrixXcd stacked(d * chi_l, chi_r);
  for (int s = 0; s < d; ++s) stacked.block(s * chi_l, 0, chi_l, chi_r) = a.blocks[std::size_t(s)];
  const auto svd = linalg::svd_truncate(stacked, std::numeric_limits<long>::max() / 2, 0.0);
  return svd.values;
}

std::vector<double> MpsState::bond_entropies() {
  std::vector<double> out;
  out.reserve(std::size_t(std::max(site_count() - 1, 0)));
  for (int b = 0; b + 1 < site_count(); ++b) {
    const Eigen::VectorXd s = schmidt_values(b);
    const double total = s.squaredNorm();
    double h = 0.0;
    for (long i = 0; i < s.size(); ++i) {
      const double p = s(i) * s(i) / total;
      if (p > 1e-300) h -= p * std::log(p);
    }
    out.push_back(std::max(h, 0.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Initial states
// ---------------------------------------------------------------------------

namespace {

std::vector<int> chain_local_dims(const ModelParams& params) {
  std::vector<int> dims(std::size_t(params.mode_count) + 1, params.fock_cutoff);
  dims[0] = params.emitter_cutoff;
  return dims;
}

}  // namespace

MpsState init_product_state(const ModelParams& params,
                            const Eigen::VectorXcd& emitter_amplitudes) {
  params.validate();
  if (emitter_amplitudes.size() != params.emitter_cutoff) {
    throw ParameterError("emitter state dimension must equal emitter_cutoff");
  }
  const auto dims = chain_local_dims(params);
  std::vector<Eigen::VectorXcd> states(dims.size());
  states[0] = emitter_amplitudes;
  for (std::size_t k = 1; k < dims.size(); ++k) {
    states[k] = Eigen::VectorXcd::Zero(dims[k]);
    states[k](0) = 1.0;
  }
  return MpsState::product_state(dims, states);
}

MpsState init_product_state(const ModelParams& params, EmitterInit emitter) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(params.emitter_cutoff);
  switch (emitter) {
    case EmitterInit::ground:
      v(0) = 1.0;
      break;
    case EmitterInit::excited:
      v(1) = 1.0;
      break;
    case EmitterInit::plus_x:
      v(0) = v(1) = 1.0 / std::sqrt(2.0);
      break;
  }
  return init_product_state(params, v);
}

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

void EvolutionConfig::validate() const {
  if (!(dt > 0.0)) throw ParameterError("dt must be > 0");
  if (order != 2) throw ParameterError("only second-order Trotter splitting is supported");
  if (chi_max < 2) throw ParameterError("chi_max must be >= 2");
  if (!(svd_cut > 0.0) || svd_cut > 1e-6) throw ParameterError("svd_cut must lie in (0, 1e-6]");
  if (!(t_final > 0.0)) throw ParameterError("t_final must be > 0");
  if (stride < 1) throw ParameterError("stride must be >= 1");
}

GateSet::GateSet(const ModelParams& params, const ChainMapping& mapping) {
  params.validate();
  if (mapping.mode_count != params.mode_count) {
    throw ParameterError("chain mapping mode count does not match params");
  }
  dims_ = chain_local_dims(params);
  const int sites = int(dims_.size());
  const int d = params.fock_cutoff;

  std::vector<Eigen::MatrixXd> local(static_cast<std::size_t>(sites));
  local[0] = ops::emitter_hamiltonian(params.emitter, params.emitter_cutoff, params.omega_x);
  for (int k = 1; k < sites; ++k) {
    local[std::size_t(k)] = mapping.site_energies(k - 1) * params.omega_c * ops::number(d);
  }

  const Eigen::MatrixXd a = ops::annihilation(d);
  const Eigen::MatrixXd hop_term =
      Eigen::kroneckerProduct(a.transpose(), a).eval() +
      Eigen::kroneckerProduct(a, a.transpose()).eval();

  for (int j = 0; j + 1 < sites; ++j) {
    const int dl = dims_[std::size_t(j)];
    const int dr = dims_[std::size_t(j + 1)];
    const double wl = (j == 0) ? 1.0 : 0.5;
    const double wr = (j + 1 == sites - 1) ? 1.0 : 0.5;
    Eigen::MatrixXd h =
        wl * Eigen::kroneckerProduct(local[std::size_t(j)], Eigen::MatrixXd::Identity(dr, dr)) +
        wr * Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(dl, dl), local[std::size_t(j + 1)]);
    if (j == 0) {
      if (params.g != 0.0) {
        h += params.g * mapping.head_coupling_norm *
             Eigen::kroneckerProduct(ops::emitter_coupling(params.emitter, params.emitter_cutoff),
                                     ops::position(d));
      }
    } else {
      h += mapping.hoppings(j - 1) * params.omega_c * hop_term;
    }
    bond_dims_.emplace_back(dl, dr);
    bond_h_.push_back(std::move(h));
  }

  eigvals_.resize(bond_h_.size());
  eigvecs_.resize(bond_h_.size());
  for (std::size_t j = 0; j < bond_h_.size(); ++j) {
    linalg::sym_eig(bond_h_[j], eigvals_[j], eigvecs_[j]);
  }
}

Eigen::MatrixXcd GateSet::gate(int bond, double dt, EvolutionConfig::Mode mode) const {
  const auto& v = eigvecs_[std::size_t(bond)];
  const auto& lam = eigvals_[std::size_t(bond)];
  Eigen::VectorXcd phases(lam.size());
  if (mode == EvolutionConfig::Mode::real_time) {
    for (long i = 0; i < lam.size(); ++i) {
      phases(i) = std::exp(std::complex<double>(0.0, -lam(i) * dt));
    }
  } else {
    for (long i = 0; i < lam.size(); ++i) phases(i) = std::exp(-lam(i) * dt);
  }
  return v * phases.asDiagonal() * v.transpose();
}

GateSet trotter_gates(const ModelParams& params, const ChainMapping& mapping,
                      const EvolutionConfig& config) {
  config.validate();
  return GateSet(params, mapping);
}

// ---------------------------------------------------------------------------
// Evolution
// ---------------------------------------------------------------------------

namespace {

struct GateCache {
  std::vector<Eigen::MatrixXcd> half;  // even bonds at dt/2 (others unused)
  std::vector<Eigen::MatrixXcd> full;  // all bonds at dt
};

GateCache build_cache(const GateSet& gates, double dt, EvolutionConfig::Mode mode) {
  GateCache cache;
  cache.half.resize(std::size_t(gates.bond_count()));
  cache.full.resize(std::size_t(gates.bond_count()));
  for (int j = 0; j < gates.bond_count(); ++j) {
    cache.full[std::size_t(j)] = gates.gate(j, dt, mode);
    if (j % 2 == 0) cache.half[std::size_t(j)] = gates.gate(j, 0.5 * dt, mode);
  }
  return cache;
}

// Applies one even (ascending) or odd (descending) layer.
void apply_layer(MpsState& state, const std::vector<Eigen::MatrixXcd>& layer_gates,
                 bool even, int chi_max, double svd_cut, double& worst_discard) {
  const int bonds = int(layer_gates.size());
  if (even) {
    for (int j = 0; j < bonds; j += 2) {
      worst_discard = std::max(
          worst_discard, state.apply_two_site_gate(j, layer_gates[std::size_t(j)], chi_max,
                                                   svd_cut, /*move_right=*/true));
    }
  } else {
    const int last_odd = (bonds - 1) % 2 == 1 ? bonds - 1 : bonds - 2;
    for (int j = last_odd; j >= 1; j -= 2) {
      if (state.center() > j + 1) state.gauge_to(j + 1);
      worst_discard = std::max(
          worst_discard, state.apply_two_site_gate(j, layer_gates[std::size_t(j)], chi_max,
                                                   svd_cut, /*move_right=*/false));
    }
  }
}

}  // namespace

double measure_energy(MpsState& state, const GateSet& gates) {
  double e = 0.0;
  for (int j = 0; j < gates.bond_count(); ++j) {
    e += state.expect_two_site(j, gates.bond_hamiltonian(j)).real();
  }
  return e;
}

EvolutionResult evolve(MpsState& state, const GateSet& gates,
                       const EvolutionConfig& config, const EvolutionObserver& observer) {
  config.validate();
  if (state.site_count() != int(gates.local_dims().size())) {
    throw ParameterError("state does not match gate set");
  }
  const bool renorm =
      config.renormalize || config.mode == EvolutionConfig::Mode::imaginary_time;
  const int sites = state.site_count();
  const GateCache cache = build_cache(gates, config.dt, config.mode);

  EvolutionResult result;
  result.initial_energy = measure_energy(state, gates);

  const Eigen::MatrixXcd emitter_n = ops::number(state.physical_dim(0));
  const Eigen::MatrixXcd chain_n =
      sites > 1 ? Eigen::MatrixXcd(ops::number(state.physical_dim(1))) : Eigen::MatrixXcd();

  auto measure = [&](int step) {
    const double t = step * config.dt;
    result.times.push_back(t);
    result.norms.push_back(state.norm());
    result.max_bond_dims.push_back(state.max_bond_dim());
    state.gauge_to(0);
    result.emitter_population.push_back(state.expect_site(0, emitter_n).real());
    Eigen::VectorXd occ(sites - 1);
    for (int k = 1; k < sites; ++k) occ(k - 1) = state.expect_site(k, chain_n).real();
    result.site_occupations.push_back(std::move(occ));
    if (observer) {
      EvolutionRecord rec;
      rec.step = step;
      rec.time = t;
      rec.norm = result.norms.back();
      rec.discarded_weight = state.cumulative_discarded_weight();
      observer(rec, state);
    }
  };

  const long total_steps = std::max<long>(1, std::lround(config.t_final / config.dt));
  measure(0);

  long step = 0;
  while (step < total_steps) {
    const long block = std::min<long>(config.stride, total_steps - step);
    double worst = 0.0;
    // Second-order block: E(dt/2) [O(dt) E(dt)]^{block-1} O(dt) E(dt/2).
    apply_layer(state, cache.half, true, config.chi_max, config.svd_cut, worst);
    if (renorm) state.normalize();
    for (long k = 0; k < block; ++k) {
      apply_layer(state, cache.full, false, config.chi_max, config.svd_cut, worst);
      if (renorm) state.normalize();
      const bool last = (k + 1 == block);
      apply_layer(state, last ? cache.half : cache.full, true, config.chi_max,
                  config.svd_cut, worst);
      if (renorm) state.normalize();
    }
    step += block;

    if (worst > 1000.0 * config.svd_cut && state.max_bond_dim() >= config.chi_max) {
      throw TruncationError(
          "bond dimension cap " + std::to_string(config.chi_max) +
              " saturated with discarded weight " + std::to_string(worst),
          result.times, result.emitter_population);
    }
    measure(int(step));
  }

  result.final_energy = measure_energy(state, gates);
  result.norm_drift = std::abs(result.norms.back() - 1.0);
  result.discarded_total = state.cumulative_discarded_weight();
  return result;
}

GroundStateResult ground_state_imaginary(const ModelParams& params,
                                         const ChainMapping& mapping,
                                         const GroundStateConfig& config) {
  params.validate();
  const GateSet gates(params, mapping);
  MpsState state = init_product_state(params, EmitterInit::ground);

  GroundStateResult out;
  out.energy = measure_energy(state, gates);
  out.energy_trace.push_back(out.energy);

  for (std::size_t stage = 0; stage < config.schedule.size(); ++stage) {
    const auto [dtau, max_steps] = config.schedule[stage];
    const bool final_stage = (stage + 1 == config.schedule.size());
    const GateCache cache =
        build_cache(gates, dtau, EvolutionConfig::Mode::imaginary_time);

    double prev_energy = out.energy;
    bool stage_converged = false;
    int steps_done = 0;
    while (steps_done < max_steps) {
      const int block = std::min(config.batch, max_steps - steps_done);
      double worst = 0.0;
      apply_layer(state, cache.half, true, config.chi_max, config.svd_cut, worst);
      state.normalize();
      for (int k = 0; k < block; ++k) {
        apply_layer(state, cache.full, false, config.chi_max, config.svd_cut, worst);
        state.normalize();
        apply_layer(state, k + 1 == block ? cache.half : cache.full, true,
                    config.chi_max, config.svd_cut, worst);
        state.normalize();
      }
      steps_done += block;
      const double energy = measure_energy(state, gates);
      out.energy_trace.push_back(energy);
      const double rate = std::abs(energy - prev_energy) / (block * dtau);
      prev_energy = energy;
      if (rate < config.energy_tolerance) {
        stage_converged = true;
        break;
      }
    }
    out.energy = prev_energy;
    if (final_stage) out.converged = stage_converged;
  }

  if (!out.converged) {
    throw ConvergenceError("imaginary-time evolution did not converge within the step budget",
                           out.energy_trace);
  }

  out.emitter_population =
      state.expect_site(0, ops::number(params.emitter_cutoff)).real();
  out.chain_correlations = state.correlation_matrix(
      1, params.mode_count, ops::annihilation(params.fock_cutoff));
  out.state = std::move(state);
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

std::uint64_t params_hash(const ModelParams& params) {
  char buffer[256];
  std::snprintf(buffer, sizeof(buffer),
                "wx=%.17g;wc=%.17g;g=%.17g;M=%d;em=%d;chi=%.17g;d=%d;de=%d",
                params.omega_x, params.omega_c, params.g, params.mode_count,
                int(params.emitter.type), params.emitter.chi, params.fock_cutoff,
                params.emitter_cutoff);
  std::uint64_t hash = 14695981039346656037ull;
  for (const char* p = buffer; *p; ++p) {
    hash ^= std::uint64_t(static_cast<unsigned char>(*p));
    hash *= 1099511628211ull;
  }
  return hash;
}

namespace {

constexpr char checkpoint_magic[8] = {'M', 'M', 'P', 'S', 'C', 'K', 'P', 'T'};

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& value) {
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
}

}  // namespace

void save_checkpoint(const MpsState& state, const std::string& path,
                     const CheckpointInfo& info) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open checkpoint file for writing: " + path);
  out.write(checkpoint_magic, sizeof(checkpoint_magic));
  write_pod(out, std::uint32_t{1});
  write_pod(out, info.params_hash);
  write_pod(out, info.step_index);
  write_pod(out, std::int32_t(state.site_count()));
  write_pod(out, std::int32_t(state.center()));
  write_pod(out, state.cumulative_discarded_weight());
  for (int k = 0; k < state.site_count(); ++k) {
    const SiteTensor& tensor = state.tensor(k);
    write_pod(out, std::int32_t(tensor.phys()));
    write_pod(out, std::int64_t(tensor.left_dim()));
    write_pod(out, std::int64_t(tensor.right_dim()));
    for (const auto& block : tensor.blocks) {
      out.write(reinterpret_cast<const char*>(block.data()),
                std::streamsize(sizeof(std::complex<double>)) * block.size());
    }
  }
  if (!out) throw ResourceError("checkpoint write failed: " + path);
}

MpsState load_checkpoint(const std::string& path, CheckpointInfo* info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open checkpoint file: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, checkpoint_magic, sizeof(magic)) != 0) {
    throw ParameterError("not a checkpoint file: " + path);
  }
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != 1) throw ParameterError("unsupported checkpoint version");

  CheckpointInfo local;
  read_pod(in, local.params_hash);
  read_pod(in, local.step_index);
  std::int32_t site_count = 0, center = 0;
  double discarded = 0.0;
  read_pod(in, site_count);
  read_pod(in, center);
  read_pod(in, discarded);
  if (site_count < 1) throw ParameterError("corrupt checkpoint header");

  std::vector<int> dims;
  std::vector<Eigen::VectorXcd> dummy;
  MpsState state;
  // Rebuild through a minimal product state, then overwrite tensors.
  dims.assign(std::size_t(site_count), 1);
  dummy.assign(std::size_t(site_count), Eigen::VectorXcd::Ones(1));
  state = MpsState::product_state(dims, dummy);
  for (int k = 0; k < site_count; ++k) {
    std::int32_t phys = 0;
    std::int64_t chi_l = 0, chi_r = 0;
    read_pod(in, phys);
    read_pod(in, chi_l);
    read_pod(in, chi_r);
    if (phys < 1 || chi_l < 1 || chi_r < 1) throw ParameterError("corrupt checkpoint tensor");
    SiteTensor tensor;
    tensor.blocks.resize(std::size_t(phys));
    for (auto& block : tensor.blocks) {
      block.resize(chi_l, chi_r);
      in.read(reinterpret_cast<char*>(block.data()),
              std::streamsize(sizeof(std::complex<double>)) * block.size());
    }
    state.tensor(k) = std::move(tensor);
  }
  if (!in) throw ParameterError("truncated checkpoint file: " + path);
  state.restore_metadata(center, discarded);
  if (info) *info = local;
  return state;
}

}  // namespace mmrabi
