#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmrabi/chain.hpp"
#include "mmrabi/model.hpp"

namespace mmrabi {

/// Rank-3 site tensor stored as one (chi_left x chi_right) block per
/// physical index.
struct SiteTensor {
  std::vector<Eigen::MatrixXcd> blocks;

  int phys() const { return int(blocks.size()); }
  long left_dim() const { return blocks.empty() ? 0 : blocks.front().rows(); }
  long right_dim() const { return blocks.empty() ? 0 : blocks.front().cols(); }
};

/// Matrix product state for the chain-ordered system
/// [emitter, b_0, ..., b_{M-1}], kept in mixed-canonical form around an
/// orthogonality center. Gauge moves are representation changes only; every
/// truncation is logged in the discarded-weight ledger.
class MpsState {
 public:
  MpsState() = default;

  /// Bond dimension 1 product state; one normalized local state per site.
  static MpsState product_state(const std::vector<int>& local_dims,
                                const std::vector<Eigen::VectorXcd>& site_states);

  int site_count() const { return int(sites_.size()); }
  int physical_dim(int site) const { return sites_[std::size_t(site)].phys(); }
  long bond_dim(int bond) const;  // bond b sits between sites b and b+1
  long max_bond_dim() const;
  int center() const { return center_; }

  const SiteTensor& tensor(int site) const { return sites_[std::size_t(site)]; }
  SiteTensor& tensor(int site) { return sites_[std::size_t(site)]; }

  /// Moves the orthogonality center by QR sweeps.
  void gauge_to(int site);

  double norm();        // gauges to the current center, O(chi^2 d)
  void normalize();
  bool is_normalized(double tol = 1e-8);

  double cumulative_discarded_weight() const { return discarded_; }

  /// Applies a two-site gate on (bond, bond+1); gate is
  /// (d_l*d_r) x (d_l*d_r) with left-major combined index. Truncates to
  /// chi_max / svd_cut, updates the ledger, and leaves the center on the
  /// right (move_right) or left site of the bond. Returns the discarded
  /// weight of this application.
  double apply_two_site_gate(int bond, const Eigen::MatrixXcd& gate, int chi_max,
                             double svd_cut, bool move_right);

  /// <psi| op_site |psi> for a normalized state; gauges internally.
  std::complex<double> expect_site(int site, const Eigen::MatrixXcd& op);

  /// <psi| op on (bond, bond+1) |psi>, same index convention as gates.
  std::complex<double> expect_two_site(int bond, const Eigen::MatrixXcd& op);

  /// Hermitian matrix <A'_i A_j> over the site range [first, first+count),
  /// where A is the given single-site annihilation-type operator.
  Eigen::MatrixXcd correlation_matrix(int first, int count,
                                      const Eigen::MatrixXcd& annihilator);

  /// Von Neumann entropies of every bond cut.
  std::vector<double> bond_entropies();

  /// Schmidt values across one bond.
  Eigen::VectorXd schmidt_values(int bond);

  /// Used by checkpoint deserialization only.
  void restore_metadata(int center, double discarded) {
    center_ = center;
    discarded_ = discarded;
  }

 private:
  void left_normalize_site(int site);   // absorb R into site+1
  void right_normalize_site(int site);  // absorb L into site-1

  std::vector<SiteTensor> sites_;
  int center_ = 0;
  double discarded_ = 0.0;
};

enum class EmitterInit { ground, excited, plus_x };

/// |emitter> x |vacuum> product state in the chain basis. The chain vacuum
/// coincides with the star vacuum because the mapping is a passive rotation.
MpsState init_product_state(const ModelParams& params, EmitterInit emitter);
MpsState init_product_state(const ModelParams& params,
                            const Eigen::VectorXcd& emitter_amplitudes);

struct EvolutionConfig {
  enum class Mode { real_time, imaginary_time };

  double dt = two_pi / 2000.0;  // Trotter step, units 1 / omega_c
  int order = 2;                // symmetric second-order splitting (fixed)
  int chi_max = 64;
  double svd_cut = 1e-10;       // relative discarded-weight threshold per SVD
  double t_final = 3.0 * two_pi;
  int stride = 5;               // measure every `stride` steps
  Mode mode = Mode::real_time;
  bool renormalize = false;     // always on in imaginary time

  void validate() const;
};

/// Even/odd bond-gate factory for the chain Hamiltonian. Single-site terms
/// are split between adjacent bonds (boundary sites weight their only bond
/// fully); the emitter-b_0 bond carries the g*rho_0 coupling and the emitter
/// term. Bond Hamiltonians are real symmetric, so gates come from one cached
/// eigendecomposition per bond and any requested dt is cheap.
class GateSet {
 public:
  GateSet(const ModelParams& params, const ChainMapping& mapping);

  int bond_count() const { return int(bond_dims_.size()); }
  const std::vector<std::pair<int, int>>& bond_dims() const { return bond_dims_; }
  const Eigen::MatrixXd& bond_hamiltonian(int bond) const {
    return bond_h_[std::size_t(bond)];
  }

  /// exp(-i h dt) (real time) or exp(-h dt) (imaginary time) for one bond.
  Eigen::MatrixXcd gate(int bond, double dt, EvolutionConfig::Mode mode) const;

  const std::vector<int>& local_dims() const { return dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::pair<int, int>> bond_dims_;
  std::vector<Eigen::MatrixXd> bond_h_;
  std::vector<Eigen::VectorXd> eigvals_;
  std::vector<Eigen::MatrixXd> eigvecs_;
};

/// Validates the config and returns the gate factory for (params, mapping).
GateSet trotter_gates(const ModelParams& params, const ChainMapping& mapping,
                      const EvolutionConfig& config);

struct EvolutionRecord {
  int step = 0;
  double time = 0.0;
  double norm = 1.0;
  double discarded_weight = 0.0;
};

/// Called at every measurement stride; may inspect (and gauge) the state.
using EvolutionObserver = std::function<void(const EvolutionRecord&, MpsState&)>;

struct EvolutionResult {
  std::vector<double> times;
  std::vector<double> emitter_population;
  std::vector<Eigen::VectorXd> site_occupations;  // chain sites, per sample
  std::vector<double> norms;
  std::vector<long> max_bond_dims;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double norm_drift = 0.0;          // |norm - 1| at the end (real time)
  double discarded_total = 0.0;
};

/// Trotterized evolution with merged half-steps between measurements:
/// E(dt/2) [O(dt) E(dt)]^{k-1} O(dt) E(dt/2) per stride block.
EvolutionResult evolve(MpsState& state, const GateSet& gates,
                       const EvolutionConfig& config,
                       const EvolutionObserver& observer = {});

struct GroundStateConfig {
  // (dtau, max steps) stages, coarse to fine.
  std::vector<std::pair<double, int>> schedule = {
      {0.2, 400}, {0.05, 600}, {0.01, 800}, {0.002, 1200}, {0.0005, 4000}};
  int chi_max = 64;
  double svd_cut = 1e-10;
  // Converged when |dE| per unit imaginary time drops below this within the
  // final stage.
  double energy_tolerance = 1e-9;
  int batch = 20;  // steps between energy measurements
};

struct GroundStateResult {
  MpsState state;
  double energy = 0.0;
  double emitter_population = 0.0;
  Eigen::MatrixXcd chain_correlations;
  std::vector<double> energy_trace;
  bool converged = false;
};

/// Imaginary-time TEBD from |ground> x |vacuum>, renormalizing after every
/// half-sweep. Throws ConvergenceError (with the energy trace) if the step
/// budget runs out before the energy settles.
GroundStateResult ground_state_imaginary(const ModelParams& params,
                                         const ChainMapping& mapping,
                                         const GroundStateConfig& config = {});

/// Total energy <H> from the bond decomposition of the gate set.
double measure_energy(MpsState& state, const GateSet& gates);

/// FNV-1a hash of the canonical parameter serialization.
std::uint64_t params_hash(const ModelParams& params);

struct CheckpointInfo {
  std::uint64_t params_hash = 0;
  std::int64_t step_index = 0;
};

/// Self-describing binary dump of the site tensors (shape headers + raw
/// doubles) with a small manifest; round-trips bit-exactly.
void save_checkpoint(const MpsState& state, const std::string& path,
                     const CheckpointInfo& info);
MpsState load_checkpoint(const std::string& path, CheckpointInfo* info = nullptr);

}  // namespace mmrabi
