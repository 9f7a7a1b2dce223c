#include "beamctl/kernels.hpp"

#include <cmath>
#include <limits>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/errors.hpp"
#include "beamctl/modal_space.hpp"
#include "beamctl/observability.hpp"

namespace beamctl::kernels {
namespace {

double gramian_entry(const ControlRegion& region, double T, int i, int j) {
  const int m = i / 2;
  const int mp = j / 2;
  const double w = temporal_frequency(m);
  const double wp = temporal_frequency(mp);
  OverlapKind kind = OverlapKind::CC;
  double w1 = w;
  double w2 = wp;
  if (i % 2 == 0 && j % 2 == 1) {
    kind = OverlapKind::CS;
  } else if (i % 2 == 1 && j % 2 == 0) {
    kind = OverlapKind::CS;
    w1 = wp;
    w2 = w;
  } else if (i % 2 == 1) {
    kind = OverlapKind::SS;
  }
  return region_gain(region) * spatial_overlap(m, mp, region) *
         time_overlap(kind, w1, w2, T);
}

void check_gramian_args(const ControlRegion& region, int M) {
  validate(region);
  if (M < 1) throw InvalidArgument("Gramian: M must be >= 1");
}

struct Cell {
  double slack;
  bool violated;
};

Cell bound_cell(double b, double t) {
  const InverseBoundResult r = inverse_bound_check(b, t);
  return {r.lhs - r.rhs, !r.ok};
}

}  // namespace

std::vector<double> sample_series(const TrigSeries& series, double T, int grid) {
  std::vector<double> out(grid);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < grid; ++k) {
    out[k] = series(T * k / (grid - 1));
  }
  return out;
}

std::vector<double> sample_series_serial(const TrigSeries& series, double T,
                                         int grid) {
  std::vector<double> out(grid);
  for (int k = 0; k < grid; ++k) {
    out[k] = series(T * k / (grid - 1));
  }
  return out;
}

Eigen::MatrixXd gramian_entries(const ControlRegion& region, double T, int M) {
  check_gramian_args(region, M);
  const int dim = 2 * M;
  Eigen::MatrixXd g(dim, dim);
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      g(i, j) = gramian_entry(region, T, i, j);
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

Eigen::MatrixXd gramian_entries_serial(const ControlRegion& region, double T,
                                       int M) {
  check_gramian_args(region, M);
  const int dim = 2 * M;
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = i; j < dim; ++j) {
      g(i, j) = gramian_entry(region, T, i, j);
    }
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

BoundSweepTally inverse_bound_sweep(const std::vector<double>& b_values,
                                    const std::vector<double>& t_values) {
  const long nb = static_cast<long>(b_values.size());
  const long nt = static_cast<long>(t_values.size());
  std::vector<Cell> cells(static_cast<std::size_t>(nb * nt));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nb * nt; ++k) {
    cells[k] = bound_cell(b_values[k / nt], t_values[k % nt]);
  }
  BoundSweepTally tally;
  tally.points = nb * nt;
  tally.min_slack = std::numeric_limits<double>::infinity();
  for (long k = 0; k < nb * nt; ++k) {
    if (cells[k].violated) ++tally.violations;
    if (cells[k].slack < tally.min_slack) {
      tally.min_slack = cells[k].slack;
      tally.worst_b = b_values[k / nt];
      tally.worst_t = t_values[k % nt];
    }
  }
  return tally;
}

BoundSweepTally inverse_bound_sweep_serial(const std::vector<double>& b_values,
                                           const std::vector<double>& t_values) {
  BoundSweepTally tally;
  tally.min_slack = std::numeric_limits<double>::infinity();
  for (double b : b_values) {
    for (double t : t_values) {
      const Cell c = bound_cell(b, t);
      ++tally.points;
      if (c.violated) ++tally.violations;
      if (c.slack < tally.min_slack) {
        tally.min_slack = c.slack;
        tally.worst_b = b;
        tally.worst_t = t;
      }
    }
  }
  return tally;
}

std::vector<double> open_unit_grid(double step) {
  std::vector<double> out;
  const long n = std::lround(1.0 / step);
  for (long k = 1; k < n; ++k) out.push_back(k * step);
  return out;
}

std::vector<double> positive_grid(double step, double t_max) {
  std::vector<double> out;
  const long n = std::lround(t_max / step);
  for (long k = 1; k <= n; ++k) out.push_back(k * step);
  return out;
}

}  // namespace beamctl::kernels
