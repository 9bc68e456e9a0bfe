#include "mmrabi/model.hpp"

#include <cmath>
#include <string>

namespace mmrabi {

void ModelParams::validate() const {
  if (!(omega_x > 0.0)) throw ParameterError("omega_x must be > 0");
  if (!(omega_c > 0.0)) throw ParameterError("omega_c must be > 0");
  if (!(g >= 0.0)) throw ParameterError("g must be >= 0");
  if (mode_count < 1) throw ParameterError("mode_count must be >= 1");
  if (fock_cutoff < 2) throw ParameterError("fock_cutoff must be >= 2");
  if (emitter.is_tls()) {
    if (emitter_cutoff != 2)
      throw ParameterError("emitter_cutoff must be 2 for a TLS emitter");
  } else {
    if (emitter_cutoff < 2)
      throw ParameterError("emitter_cutoff must be >= 2 for a Kerr emitter");
    if (!(emitter.chi >= 0.0)) throw ParameterError("chi must be >= 0");
  }
}

HamiltonianTerms build_terms(const ModelParams& params) {
  params.validate();
  HamiltonianTerms out;
  out.geometry = Geometry::star;
  out.site_count = params.mode_count + 1;

  if (params.emitter.is_tls()) {
    out.terms.push_back({{0}, TermOp::emitter_sz, 0.5 * params.omega_x});
  } else {
    out.terms.push_back({{0}, TermOp::emitter_number, params.omega_x});
    if (params.emitter.chi != 0.0)
      out.terms.push_back({{0}, TermOp::emitter_kerr, params.emitter.chi});
  }

  for (int n = 0; n < params.mode_count; ++n) {
    out.terms.push_back({{n + 1}, TermOp::boson_number, (n + 1) * params.omega_c});
  }
  if (params.g != 0.0) {
    for (int n = 0; n < params.mode_count; ++n) {
      out.terms.push_back(
          {{0, n + 1}, TermOp::position_coupling, std::sqrt(double(n + 1)) * params.g});
    }
  }
  return out;
}

double poisson_tail(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  // 1 - CDF computed from the largest terms down, in long double.
  long double term = std::exp(-(long double)mean);
  long double cdf = 0.0L;
  for (int k = 0; k < cutoff; ++k) {
    cdf += term;
    term *= mean / (k + 1);
  }
  long double tail = 1.0L - cdf;
  return tail < 0.0L ? 0.0 : double(tail);
}

CutoffDiagnostics validate_cutoffs(const ModelParams& params, double tail_threshold) {
  CutoffDiagnostics diag;
  diag.threshold = tail_threshold;

  const int m = params.mode_count;
  diag.star_mode_displacement.resize(m);
  diag.star_tail_mass.resize(m);
  for (int n = 0; n < m; ++n) {
    // Coherent trajectory of mode n is a circle through the origin of
    // diameter 2 g / (omega_c sqrt(n+1)).
    const double amp = 2.0 * params.g / (params.omega_c * std::sqrt(double(n + 1)));
    diag.star_mode_displacement[n] = amp;
    diag.star_tail_mass[n] = poisson_tail(amp * amp, params.fock_cutoff);
    if (diag.star_tail_mass[n] > tail_threshold) diag.pass = false;
  }

  // Chain head site: static estimate, coupling g*rho_0 over on-site energy
  // omega_0 = 1 + 2(M-1)/3 (units of omega_c).
  const double rho0 = std::sqrt(0.5 * double(m) * double(m + 1));
  const double omega0 = params.omega_c * (1.0 + 2.0 * double(m - 1) / 3.0);
  diag.chain_head_displacement = params.g * rho0 / omega0;
  diag.chain_head_tail_mass =
      poisson_tail(diag.chain_head_displacement * diag.chain_head_displacement,
                   params.fock_cutoff);
  if (diag.chain_head_tail_mass > tail_threshold) diag.pass = false;
  return diag;
}

}  // namespace mmrabi
