#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mmrabi/analytic.hpp"
#include "mmrabi/model.hpp"

namespace mmrabi {

enum class Source { analytic, mps, exact };

std::string to_string(Source source);

struct TimeSeries {
  std::vector<double> times;   // units 1/omega_c
  std::vector<double> values;
  Source source = Source::analytic;
  std::string label;
};

/// Field intensity sampled on a space-time grid, in units of the squared
/// single-photon field prefactor. amplitude(i, j) belongs to (x_grid[i],
/// t_grid[j]).
struct FieldMap {
  std::vector<double> x_grid;  // units of L
  std::vector<double> t_grid;  // units of 1/omega_c
  Eigen::MatrixXd amplitude;
  Source source = Source::analytic;
};

/// Uniform grid helpers (inclusive endpoints).
std::vector<double> linspace(double lo, double hi, int count);

/// Closed-form field map evaluated pointwise.
FieldMap analytic_field_map(const CoherentSolution& solution,
                            const std::vector<double>& x_grid,
                            const std::vector<double>& t_grid);

/// Field profile from a star-basis correlation matrix <a_n' a_m>:
/// quadratic form with mode functions sqrt(n+1) cos(2 pi x (n+1)), scaled by
/// (omega_c/g)^2 to match the prefactor units. Requires g > 0.
Eigen::VectorXd field_profile_from_correlation(const Eigen::MatrixXcd& star_corr,
                                               const std::vector<double>& x_grid,
                                               const ModelParams& params);

/// Field map from one correlation matrix per time sample.
FieldMap field_map_from_correlations(const std::vector<Eigen::MatrixXcd>& star_corr,
                                     const std::vector<double>& x_grid,
                                     const std::vector<double>& t_grid,
                                     const ModelParams& params, Source source);

struct RevivalReport {
  std::vector<double> peak_times;
  std::vector<double> peak_heights;
  std::vector<double> peak_widths;  // at half prominence
  double plateau_level = 0.0;       // median of the series
};

/// Local-maximum scan with a prominence threshold. An empty report (no peaks
/// above threshold) is a valid result, not an error.
RevivalReport detect_revivals(const TimeSeries& series,
                              double prominence_threshold = 0.05);

struct CausalityReport {
  int mode_count = 0;
  std::vector<double> front_times;
  std::vector<double> front_positions;  // largest |x| above threshold
  double front_speed = 0.0;             // fitted, units L*omega_c
  double leakage = 0.0;                 // signal integral outside |x| <= c t
  double total_signal = 0.0;
  double leakage_fraction = 0.0;
  double threshold = 0.0;
};

/// Branch-resolved mean-field map for the closed-form solution.
Eigen::MatrixXcd branch_mean_field_map(const CoherentSolution& solution, Branch branch,
                                       const std::vector<double>& x_grid,
                                       const std::vector<double>& t_grid);

/// Light-cone analysis of the branch-distinguishing signal
/// |field_plus - field_minus|: front trajectory, fitted front speed, and the
/// out-of-cone leakage integral (trapezoid rule on the fixed grid).
CausalityReport causality_analysis(const Eigen::MatrixXcd& field_plus,
                                   const Eigen::MatrixXcd& field_minus,
                                   const std::vector<double>& x_grid,
                                   const std::vector<double>& t_grid,
                                   const ModelParams& params,
                                   double threshold_fraction = 0.01);

struct CloudProfile {
  std::vector<double> x_grid;
  Eigen::VectorXd amplitude;
};

/// Bound-cloud profile of a (ground-state) correlation matrix.
CloudProfile ground_cloud_extract(const Eigen::MatrixXcd& star_corr,
                                  const std::vector<double>& x_grid,
                                  const ModelParams& params);

/// Bound-cloud profile from the first time column of a field map.
CloudProfile ground_cloud_extract(const FieldMap& map);

/// Relative L2 distance between two profiles on a common grid.
double relative_l2_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace mmrabi
