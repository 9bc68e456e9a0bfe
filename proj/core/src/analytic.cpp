#include "mmrabi/analytic.hpp"

#include <cmath>
#include <string>

namespace mmrabi {

namespace {

// Phase of mode n at time t, reduced to [0, 2*pi). Working in roundtrip
// units keeps the reduction exact at integer roundtrips, so full-revival
// identities hold exactly in floating point.
inline double reduced_phase(int n, double t, double omega_c) {
  const double u = t * omega_c / two_pi;  // time in roundtrips
  double un = double(n + 1) * u;
  un -= std::floor(un);
  return two_pi * un;
}

inline void check_position(double x) {
  if (!(std::abs(x) <= 0.5 + 1e-12)) {
    throw ParameterError("position x must lie in [-1/2, 1/2] (units of L)");
  }
}

}  // namespace

CoherentSolution::CoherentSolution(ModelParams params) : params_(std::move(params)) {
  params_.validate();
}

std::complex<double> CoherentSolution::base_amplitude() const {
  return {0.0, params_.g / params_.omega_c};
}

std::complex<double> CoherentSolution::beta(int n, double t) const {
  if (n < 0 || n >= params_.mode_count) {
    throw ParameterError("mode index out of range: n = " + std::to_string(n));
  }
  const double theta = reduced_phase(n, t, params_.omega_c);
  const std::complex<double> rot(std::cos(theta) - 1.0, -std::sin(theta));
  return base_amplitude() / std::sqrt(double(n + 1)) * rot;
}

double CoherentSolution::overlap_exponent(double t) const {
  const double ratio = params_.g / params_.omega_c;
  long double acc = 0.0L;
  for (int n = 0; n < params_.mode_count; ++n) {
    const double theta = reduced_phase(n, t, params_.omega_c);
    const double s = std::sin(0.5 * theta);
    // 1 - cos(theta) = 2 sin^2(theta/2); exact zero at full revivals.
    acc += (long double)(4.0 * s * s) / (n + 1);
  }
  return ratio * ratio * double(acc);
}

double CoherentSolution::overlap(double t) const {
  return std::exp(-2.0 * overlap_exponent(t));
}

double CoherentSolution::revival_probability(double t) const {
  return std::exp(-overlap_exponent(t));
}

double CoherentSolution::population(double t) const {
  return 0.5 * (1.0 + overlap(t));
}

SteadyOverlap CoherentSolution::steady_overlap() const {
  if (params_.mode_count < 2) {
    throw ParameterError("steady overlap requires mode_count >= 2");
  }
  const double ratio = params_.g / params_.omega_c;
  SteadyOverlap out;
  out.closed_form = std::exp(-4.0 * ratio * ratio *
                             std::log(2.0 * std::exp(euler_gamma) * params_.mode_count));
  out.exact_midpoint = overlap(0.5 * two_pi / params_.omega_c);
  return out;
}

double CoherentSolution::field_amplitude(double x, double t) const {
  check_position(x);
  long double re = 0.0L, im = 0.0L;
  for (int n = 0; n < params_.mode_count; ++n) {
    const double theta = reduced_phase(n, t, params_.omega_c);
    const double f = std::cos(two_pi * x * (n + 1));
    const double s = std::sin(0.5 * theta);
    re += (long double)(f * (-2.0 * s * s));  // cos(theta) - 1
    im += (long double)(f * (-std::sin(theta)));
  }
  const double r = double(re), i = double(im);
  return r * r + i * i;
}

double CoherentSolution::bound_amplitude(double x) const {
  check_position(x);
  long double acc = 0.0L;
  for (int n = 0; n < params_.mode_count; ++n) {
    acc += (long double)std::cos(two_pi * x * (n + 1));
  }
  const double s = double(acc);
  return s * s;
}

double CoherentSolution::propagating_amplitude(double x, double t) const {
  check_position(x);
  long double re = 0.0L, im = 0.0L;
  for (int n = 0; n < params_.mode_count; ++n) {
    const double theta = reduced_phase(n, t, params_.omega_c);
    const double f = std::cos(two_pi * x * (n + 1));
    re += (long double)(f * std::cos(theta));
    im += (long double)(f * (-std::sin(theta)));
  }
  const double r = double(re), i = double(im);
  return r * r + i * i;
}

std::complex<double> CoherentSolution::mean_field(double x, double t,
                                                  Branch branch) const {
  check_position(x);
  long double re = 0.0L, im = 0.0L;
  for (int n = 0; n < params_.mode_count; ++n) {
    const double theta = reduced_phase(n, t, params_.omega_c);
    const double f = std::cos(two_pi * x * (n + 1));
    const double s = std::sin(0.5 * theta);
    re += (long double)(f * (-2.0 * s * s));
    im += (long double)(f * (-std::sin(theta)));
  }
  const double sign = (branch == Branch::plus) ? 1.0 : -1.0;
  return {sign * double(re), sign * double(im)};
}

BreakdownConditions CoherentSolution::breakdown(double factor) const {
  BreakdownConditions out;
  out.factor = factor;
  out.bandwidth_ratio = params_.mode_count * params_.omega_c / params_.omega_x;
  const double obar =
      params_.mode_count >= 2 ? steady_overlap().closed_form : overlap(0.5 * two_pi);
  out.suppression_ratio =
      params_.g > 0.0 ? params_.g / (params_.omega_x * obar) : 0.0;
  return out;
}

std::vector<PhaseSpacePoint> phase_trajectories(const ModelParams& params,
                                                int n_max, int samples) {
  params.validate();
  if (n_max < 1 || n_max > params.mode_count) {
    throw ParameterError("n_max must lie in [1, mode_count]");
  }
  if (samples < 2) throw ParameterError("samples must be >= 2");
  CoherentSolution sol(params);
  std::vector<PhaseSpacePoint> out;
  out.reserve(2 * std::size_t(n_max) * (samples + 1));
  const double period = two_pi / params.omega_c;
  for (int n = 0; n < n_max; ++n) {
    for (Branch branch : {Branch::plus, Branch::minus}) {
      const double sign = (branch == Branch::plus) ? -1.0 : 1.0;
      for (int j = 0; j <= samples; ++j) {
        const double t = period * double(j) / double(samples);
        const std::complex<double> amp = sign * sol.beta(n, t);
        out.push_back({n, branch, t, amp.real(), amp.imag()});
      }
    }
  }
  return out;
}

double lambert_w0(double x) {
  if (x < 0.0) throw ParameterError("lambert_w0 requires x >= 0");
  if (x == 0.0) return 0.0;
  double w = std::log1p(x);
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-12 * std::max(1.0, std::abs(w))) return w;
  }
  throw ConvergenceError("lambert_w0 did not converge for x = " + std::to_string(x));
}

CriticalCoupling critical_coupling(int mode_count, double omega_x, double omega_c) {
  if (mode_count < 2) throw ParameterError("critical coupling requires mode_count >= 2");
  if (!(omega_c > 0.0)) throw ParameterError("omega_c must be > 0");
  if (omega_x < 0.0) throw ParameterError("omega_x must be >= 0");

  CriticalCoupling out;
  if (omega_x == 0.0) return out;  // decoupled-qubit limit: W(0) = 0

  // Closed form keeps the conventional M+1 argument; the numeric root uses
  // the same steady-overlap expression as the solver (log argument 2 e^g M).
  const double lam_closed = std::log(2.0 * std::exp(euler_gamma) * (mode_count + 1));
  const double r = omega_x / omega_c;
  out.closed_form =
      omega_c * std::sqrt(lambert_w0(8.0 * lam_closed * r * r) / (8.0 * lam_closed));

  const double lam = std::log(2.0 * std::exp(euler_gamma) * mode_count);
  auto f = [&](double g) {
    const double gg = g / omega_c;
    return g - omega_x * std::exp(-4.0 * gg * gg * lam);
  };
  double lo = 0.0, hi = 10.0 * omega_c;
  if (!(f(hi) > 0.0)) {
    throw ConvergenceError("critical coupling root not bracketed in (0, 10 omega_c]");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-14 * omega_c; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  out.numeric_root = 0.5 * (lo + hi);
  return out;
}

}  // namespace mmrabi
