#pragma once

#include <string>
#include <vector>

#include "mmrabi/errors.hpp"

namespace mmrabi {

inline constexpr const char* version_string = "0.1.0";

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double euler_gamma = 0.57721566490153286060651209008;

/// Dimensionless unit system shared by every engine.
///
/// hbar = 1 and the fundamental cavity frequency omega_c define the units:
/// time is measured in 1/omega_c (one cavity roundtrip = 2*pi), position in
/// units of the cavity length with x in [-1/2, 1/2] and the emitter at x = 0,
/// field amplitudes in units of the squared single-photon field prefactor,
/// and the light speed is c = L * omega_c / (2*pi).
struct UnitsConvention {
  double omega_c = 1.0;
  double cavity_length = 1.0;

  double roundtrip_time() const { return two_pi / omega_c; }
  double light_speed() const { return cavity_length * omega_c / two_pi; }
};

enum class EmitterType { tls, kerr };

/// Emitter model: a two-level system, or a weakly nonlinear bosonic mode
/// with Kerr coefficient chi (units of omega_c).
struct EmitterKind {
  EmitterType type = EmitterType::tls;
  double chi = 0.0;

  static EmitterKind make_tls() { return {EmitterType::tls, 0.0}; }
  static EmitterKind make_kerr(double chi) { return {EmitterType::kerr, chi}; }
  bool is_tls() const { return type == EmitterType::tls; }
};

/// Physical parameters in dimensionless units (omega_c = 1 sets the scale).
struct ModelParams {
  double omega_x = 1.0;   // emitter frequency, units of omega_c
  double omega_c = 1.0;   // fundamental cavity frequency (time unit)
  double g = 0.6;         // coupling rate, units of omega_c
  int mode_count = 50;    // number of symmetric cavity modes M
  EmitterKind emitter{};
  int fock_cutoff = 12;   // local dimension per photon site
  int emitter_cutoff = 2; // local dimension of the emitter site (2 for TLS)

  /// Throws ParameterError naming the violated invariant.
  void validate() const;
};

/// Operator labels for symbolic Hamiltonian term lists.
enum class TermOp {
  emitter_sz,        // sigma_z on the emitter site (TLS)
  emitter_number,    // b'b on the emitter site (Kerr)
  emitter_kerr,      // b'b'bb on the emitter site (Kerr)
  boson_number,      // a'a on one photon site
  position_coupling, // (emitter position op) x (a + a') on [emitter, photon]
  hop                // b'_i b_j + b'_j b_i between two photon sites
};

struct HamiltonianTerm {
  std::vector<int> sites;  // 0 = emitter, 1..M = photon sites
  TermOp op;
  double coeff;
};

enum class Geometry { star, chain };

struct HamiltonianTerms {
  Geometry geometry = Geometry::star;
  int site_count = 0;  // emitter + photon sites
  // Phase convention: couplings are real, g * sx * (a + a'). The antisymmetric
  // convention -i g * sx * (a - a') maps onto it under the mode phase rotation
  // a -> -i a, which leaves populations, field intensities, and spectra
  // unchanged.
  std::string coupling_convention = "real-position";
  std::vector<HamiltonianTerm> terms;
};

/// Full term list of the model in the star geometry. Zero-coefficient terms
/// (e.g. couplings at g = 0) are omitted.
HamiltonianTerms build_terms(const ModelParams& params);

/// Advisory cutoff diagnostics: worst-case coherent displacements implied by
/// the closed-form dynamics and the Poisson tail mass they leave above the
/// configured Fock cutoffs.
struct CutoffDiagnostics {
  std::vector<double> star_mode_displacement;  // max |amplitude| per star mode
  std::vector<double> star_tail_mass;          // Poisson tail above fock_cutoff
  double chain_head_displacement = 0.0;        // g*rho_0 / omega_0 estimate
  double chain_head_tail_mass = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

CutoffDiagnostics validate_cutoffs(const ModelParams& params,
                                   double tail_threshold = 1e-6);

/// P(n >= cutoff) for a Poisson distribution with the given mean.
double poisson_tail(double mean, int cutoff);

}  // namespace mmrabi
