#pragma once

// Data-parallel inner loops. Each OpenMP kernel has a serial twin with the
// same per-element arithmetic; every output element is written by exactly one
// iteration and no cross-thread reductions are used, so both versions agree
// bitwise for any thread count.

#include <vector>

#include <Eigen/Core>

#include "beamctl/region.hpp"
#include "beamctl/time_series.hpp"

namespace beamctl::kernels {

std::vector<double> sample_series(const TrigSeries& series, double T, int grid);
std::vector<double> sample_series_serial(const TrigSeries& series, double T,
                                         int grid);

/// Dense HUM Gramian, index 2m <-> a_m (cos), 2m+1 <-> beta_m (sin).
/// Upper triangle computed and mirrored.
Eigen::MatrixXd gramian_entries(const ControlRegion& region, double T, int M);
Eigen::MatrixXd gramian_entries_serial(const ControlRegion& region, double T,
                                       int M);

struct BoundSweepTally {
  long points = 0;
  long violations = 0;
  /// min over the grid of lhs - rhs.
  double min_slack = 0.0;
  double worst_b = 0.0;
  double worst_t = 0.0;
};

/// Evaluates I(b,t) >= c sin^2(pi b) on the tensor grid.
BoundSweepTally inverse_bound_sweep(const std::vector<double>& b_values,
                                    const std::vector<double>& t_values);
BoundSweepTally inverse_bound_sweep_serial(const std::vector<double>& b_values,
                                           const std::vector<double>& t_values);

/// Grid b = step, 2 step, ... < 1 and t = step, ..., t_max (inclusive).
std::vector<double> open_unit_grid(double step);
std::vector<double> positive_grid(double step, double t_max);

}  // namespace beamctl::kernels
