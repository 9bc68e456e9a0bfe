#include "mmrabi/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mmrabi {

std::string to_string(Source source) {
  switch (source) {
    case Source::analytic: return "analytic";
    case Source::mps: return "mps";
    case Source::exact: return "exact";
  }
  return "unknown";
}

std::vector<double> linspace(double lo, double hi, int count) {
  if (count < 2) throw ParameterError("linspace needs at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(count - 1);
  }
  return out;
}

FieldMap analytic_field_map(const CoherentSolution& solution,
                            const std::vector<double>& x_grid,
                            const std::vector<double>& t_grid) {
  FieldMap map;
  map.x_grid = x_grid;
  map.t_grid = t_grid;
  map.source = Source::analytic;
  map.amplitude.resize(long(x_grid.size()), long(t_grid.size()));
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      map.amplitude(long(i), long(j)) = solution.field_amplitude(x_grid[i], t_grid[j]);
    }
  }
  return map;
}

Eigen::VectorXd field_profile_from_correlation(const Eigen::MatrixXcd& star_corr,
                                               const std::vector<double>& x_grid,
                                               const ModelParams& params) {
  const int m = params.mode_count;
  if (star_corr.rows() != m || star_corr.cols() != m) {
    throw ParameterError("correlation matrix must be mode_count x mode_count");
  }
  if (!(params.g > 0.0)) {
    throw ParameterError("field units require g > 0; the prefactor scales with g^2");
  }
  const double scale = (params.omega_c / params.g) * (params.omega_c / params.g);
  Eigen::VectorXd profile(long(x_grid.size()));
  Eigen::VectorXd w(m);
  for (std::size_t ix = 0; ix < x_grid.size(); ++ix) {
    const double x = x_grid[ix];
    if (!(std::abs(x) <= 0.5 + 1e-12)) {
      throw ParameterError("position x must lie in [-1/2, 1/2] (units of L)");
    }
    for (int n = 0; n < m; ++n) {
      w(n) = std::sqrt(double(n + 1)) * std::cos(two_pi * x * (n + 1));
    }
    const Eigen::VectorXd cw = (star_corr * w.cast<std::complex<double>>()).real();
    profile(long(ix)) = scale * w.dot(cw);
  }
  return profile;
}

FieldMap field_map_from_correlations(const std::vector<Eigen::MatrixXcd>& star_corr,
                                     const std::vector<double>& x_grid,
                                     const std::vector<double>& t_grid,
                                     const ModelParams& params, Source source) {
  if (star_corr.size() != t_grid.size()) {
    throw ParameterError("one correlation matrix per time sample required");
  }
  FieldMap map;
  map.x_grid = x_grid;
  map.t_grid = t_grid;
  map.source = source;
  map.amplitude.resize(long(x_grid.size()), long(t_grid.size()));
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    map.amplitude.col(long(j)) =
        field_profile_from_correlation(star_corr[j], x_grid, params);
  }
  return map;
}

namespace {

double interpolate_crossing(const std::vector<double>& t, const std::vector<double>& v,
                            std::size_t i0, std::size_t i1, double level) {
  const double v0 = v[i0], v1 = v[i1];
  if (v1 == v0) return t[i1];
  const double frac = (level - v0) / (v1 - v0);
  return t[i0] + frac * (t[i1] - t[i0]);
}

}  // namespace

RevivalReport detect_revivals(const TimeSeries& series, double prominence_threshold) {
  RevivalReport report;
  const auto& v = series.values;
  const auto& t = series.times;
  if (v.size() != t.size()) throw ParameterError("time series length mismatch");
  if (v.size() < 3) return report;

  {
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    report.plateau_level = sorted[sorted.size() / 2];
  }

  const std::size_t n = v.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(v[i] > v[i - 1])) continue;
    // Plateau peaks: skip forward over equal values, use the first index.
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 >= n || !(v[j + 1] < v[i])) continue;

    // Prominence: lowest point between the peak and the nearest higher
    // ground on each side (series end counts as a base).
    double left_min = v[i];
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] > v[i]) break;
      left_min = std::min(left_min, v[k]);
    }
    double right_min = v[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (v[k] > v[i]) break;
      right_min = std::min(right_min, v[k]);
    }
    const double prominence = v[i] - std::max(left_min, right_min);
    if (prominence < prominence_threshold) continue;

    const double half = v[i] - 0.5 * prominence;
    double t_left = t.front();
    for (std::size_t k = i; k-- > 0;) {
      if (v[k] <= half) {
        t_left = interpolate_crossing(t, v, k, k + 1, half);
        break;
      }
    }
    double t_right = t.back();
    for (std::size_t k = j + 1; k < n; ++k) {
      if (v[k] <= half) {
        t_right = interpolate_crossing(t, v, k - 1, k, half);
        break;
      }
    }

    report.peak_times.push_back(t[i]);
    report.peak_heights.push_back(v[i]);
    report.peak_widths.push_back(t_right - t_left);
    i = j;
  }
  return report;
}

Eigen::MatrixXcd branch_mean_field_map(const CoherentSolution& solution, Branch branch,
                                       const std::vector<double>& x_grid,
                                       const std::vector<double>& t_grid) {
  Eigen::MatrixXcd map(long(x_grid.size()), long(t_grid.size()));
  for (std::size_t j = 0; j < t_grid.size(); ++j) {
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      map(long(i), long(j)) = solution.mean_field(x_grid[i], t_grid[j], branch);
    }
  }
  return map;
}

CausalityReport causality_analysis(const Eigen::MatrixXcd& field_plus,
                                   const Eigen::MatrixXcd& field_minus,
                                   const std::vector<double>& x_grid,
                                   const std::vector<double>& t_grid,
                                   const ModelParams& params,
                                   double threshold_fraction) {
  const long nx = long(x_grid.size());
  const long nt = long(t_grid.size());
  if (field_plus.rows() != nx || field_plus.cols() != nt ||
      field_minus.rows() != nx || field_minus.cols() != nt) {
    throw ParameterError("field maps must match the grids");
  }

  const Eigen::MatrixXd signal = (field_plus - field_minus).cwiseAbs();
  const double global_max = signal.maxCoeff();
  const double threshold = threshold_fraction * global_max;
  const double light_speed = UnitsConvention{params.omega_c}.light_speed();

  CausalityReport report;
  report.mode_count = params.mode_count;
  report.threshold = threshold;
  report.front_times.reserve(std::size_t(nt));
  report.front_positions.reserve(std::size_t(nt));
  for (long j = 0; j < nt; ++j) {
    double front = 0.0;
    for (long i = 0; i < nx; ++i) {
      if (signal(i, j) > threshold) front = std::max(front, std::abs(x_grid[std::size_t(i)]));
    }
    report.front_times.push_back(t_grid[std::size_t(j)]);
    report.front_positions.push_back(front);
  }

  // Fit front position against time where the front is clear of both the
  // bound cloud and the cavity edge.
  {
    double sum_t = 0, sum_x = 0, sum_tt = 0, sum_tx = 0;
    long count = 0;
    for (long j = 0; j < nt; ++j) {
      const double f = report.front_positions[std::size_t(j)];
      if (f < 0.08 || f > 0.42) continue;
      const double tj = t_grid[std::size_t(j)];
      sum_t += tj;
      sum_x += f;
      sum_tt += tj * tj;
      sum_tx += tj * f;
      ++count;
    }
    if (count >= 2) {
      const double denom = count * sum_tt - sum_t * sum_t;
      report.front_speed = denom != 0.0 ? (count * sum_tx - sum_t * sum_x) / denom : 0.0;
    }
  }

  // Trapezoid weights on the fixed grid.
  auto weight = [](const std::vector<double>& grid, std::size_t i) {
    if (grid.size() < 2) return 1.0;
    if (i == 0) return 0.5 * (grid[1] - grid[0]);
    if (i + 1 == grid.size()) return 0.5 * (grid[i] - grid[i - 1]);
    return 0.5 * (grid[i + 1] - grid[i - 1]);
  };
  long double leakage = 0.0L, total = 0.0L;
  for (long j = 0; j < nt; ++j) {
    const double wt = weight(t_grid, std::size_t(j));
    const double reach = light_speed * t_grid[std::size_t(j)];
    for (long i = 0; i < nx; ++i) {
      const double w = wt * weight(x_grid, std::size_t(i));
      const double s = signal(i, j);
      total += (long double)(w * s);
      if (std::abs(x_grid[std::size_t(i)]) > reach) leakage += (long double)(w * s);
    }
  }
  report.leakage = double(leakage);
  report.total_signal = double(total);
  report.leakage_fraction = total > 0.0L ? double(leakage / total) : 0.0;
  return report;
}

CloudProfile ground_cloud_extract(const Eigen::MatrixXcd& star_corr,
                                  const std::vector<double>& x_grid,
                                  const ModelParams& params) {
  CloudProfile profile;
  profile.x_grid = x_grid;
  profile.amplitude = field_profile_from_correlation(star_corr, x_grid, params);
  return profile;
}

CloudProfile ground_cloud_extract(const FieldMap& map) {
  if (map.t_grid.empty()) throw ParameterError("field map has no time samples");
  CloudProfile profile;
  profile.x_grid = map.x_grid;
  profile.amplitude = map.amplitude.col(0);
  return profile;
}

double relative_l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw ParameterError("profiles must share a grid");
  const double ref = b.norm();
  if (ref == 0.0) return a.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (a - b).norm() / ref;
}

}  // namespace mmrabi
