#pragma once

#include <complex>
#include <vector>

#include "mmrabi/model.hpp"

namespace mmrabi {

/// Matter branch label for the displaced-oscillator solution. The emitter
/// part of each branch is an eigenstate of the coupling operator; branch
/// `plus` pairs with field amplitudes -beta_n(t), branch `minus` with the
/// exact negation.
enum class Branch { plus, minus };

struct PhaseSpacePoint {
  int mode = 0;
  Branch branch = Branch::plus;
  double t = 0.0;
  double re = 0.0;
  double im = 0.0;
};

struct SteadyOverlap {
  double closed_form = 1.0;     // [2 e^gamma M]^(-4 g^2 / omega_c^2)
  double exact_midpoint = 1.0;  // overlap evaluated halfway between revivals
};

struct BreakdownConditions {
  double bandwidth_ratio = 0.0;    // M omega_c / omega_x
  double suppression_ratio = 0.0;  // g / (omega_x * steady overlap)
  double factor = 10.0;
  bool multimode_regime() const {
    return bandwidth_ratio >= factor && suppression_ratio >= factor;
  }
};

/// Closed-form solution of the coupling-dominated dynamics: every cavity mode
/// is a displaced oscillator whose coherent amplitude traces a circle through
/// the origin, and all derived quantities (overlaps, revival probability,
/// emitter population, field profiles) follow from those amplitudes.
///
/// Series over modes are summed in fixed order n = 0..M-1 with extended
/// precision accumulators so repeated runs are bit-identical. Phases are
/// reduced modulo one roundtrip before trig evaluation, which makes the
/// full-revival identities (S = 0, O = 1 at integer roundtrips) exact.
class CoherentSolution {
 public:
  explicit CoherentSolution(ModelParams params);

  const ModelParams& params() const { return params_; }
  std::complex<double> base_amplitude() const;  // beta_0 = i g / omega_c

  /// Coherent amplitude of mode n at time t (units 1/omega_c).
  std::complex<double> beta(int n, double t) const;

  /// S(t) = (g/omega_c)^2 sum_n [2/(n+1)] (1 - cos[(n+1) omega_c t]).
  double overlap_exponent(double t) const;
  double overlap(double t) const;              // O(t)  = exp(-2 S)
  double revival_probability(double t) const;  // P0(t) = exp(-S)
  double population(double t) const;           // (1 + O) / 2

  /// Requires mode_count >= 2.
  SteadyOverlap steady_overlap() const;

  /// Field intensity at position x (units of L, |x| <= 1/2) and time t, in
  /// units of the single-photon field prefactor. Decomposes into a
  /// propagating part and a time-independent bound part.
  double field_amplitude(double x, double t) const;
  double bound_amplitude(double x) const;
  double propagating_amplitude(double x, double t) const;

  /// Branch-resolved coherent field expectation value at (x, t), same units
  /// convention; branch minus is the exact negation of branch plus.
  std::complex<double> mean_field(double x, double t, Branch branch) const;

  BreakdownConditions breakdown(double factor = 10.0) const;

 private:
  ModelParams params_;
};

/// Phase-space trajectories of modes 0..n_max-1 for both branches, sampled
/// over one fundamental period (samples+1 points per mode and branch).
std::vector<PhaseSpacePoint> phase_trajectories(const ModelParams& params,
                                                int n_max, int samples);

struct CriticalCoupling {
  double closed_form = 0.0;   // Lambert-W expression
  double numeric_root = 0.0;  // root of g = omega_x * steady_overlap(g)
};

/// Coupling beyond which the emitter splitting is negligible against the
/// decayed inter-branch overlap. Requires mode_count >= 2.
CriticalCoupling critical_coupling(int mode_count, double omega_x, double omega_c);

/// Principal branch of the Lambert W function for x >= 0 (Halley iteration,
/// 1e-12 relative tolerance, initial guess log(1+x)).
double lambert_w0(double x);

}  // namespace mmrabi
