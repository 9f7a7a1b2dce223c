#include "beamctl/observability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/errors.hpp"
#include "beamctl/hum_control.hpp"
#include "beamctl/modal_space.hpp"

namespace beamctl {

double window_mass(int m, double xi, int n) {
  const InternalRegion region{xi, n};
  validate(region);
  return window_overlap(m, m, xi, xi + region.width());
}

double window_mass_lower_bound(int n) {
  if (n < 1) throw InvalidArgument("window_mass_lower_bound: n must be >= 1");
  return 0.5 / n - std::sin(std::numbers::pi / (2.0 * n)) / std::numbers::pi;
}

WindowMassDiagnostics window_mass_diagnostics(double xi, int n, int m_count) {
  WindowMassDiagnostics out;
  const double bound = window_mass_lower_bound(n);
  out.infimum = std::numeric_limits<double>::infinity();
  for (int m = 0; m < m_count; ++m) {
    WindowMassRow row;
    row.m = m;
    row.mass = window_mass(m, xi, n);
    row.lower_bound = bound;
    row.scaled_mass = n * row.mass;
    row.bound_violated = row.mass < bound;
    if (row.bound_violated) ++out.violations;
    if (row.mass < out.infimum) {
      out.infimum = row.mass;
      out.argmin_m = m;
    }
    out.rows.push_back(row);
  }
  return out;
}

double overlap_kernel(double b, double t) {
  if (t < 1e-8) {
    // sin^2(pi b) plus the first-order term; the bare limit is off by ~pi t
    const double s = std::sin(std::numbers::pi * b);
    const double slope = 0.5 * std::numbers::pi * std::sin(2.0 * std::numbers::pi * b);
    return std::clamp(s * s + slope * t, 0.0, 1.0);
  }
  const double pt = std::numbers::pi * t;
  const double value =
      0.5 * (1.0 - std::sin(pt) / pt * std::cos(std::numbers::pi * (2.0 * b + t)));
  return std::clamp(value, 0.0, 1.0);
}

InverseBoundResult inverse_bound_check(double b, double t) {
  InverseBoundResult r;
  r.lhs = overlap_kernel(b, t);
  const double s = std::sin(std::numbers::pi * b);
  r.rhs = kInverseBoundConstant * s * s;
  r.ok = r.lhs >= r.rhs - 1e-12;
  return r;
}

StrategicReport strategic_check(std::int64_t p, std::int64_t q) {
  if (!(p > 0 && p < q)) {
    throw InvalidArgument("strategic_check: need 0 < p < q, got " +
                          std::to_string(p) + "/" + std::to_string(q));
  }
  if (std::gcd(p, q) != 1) {
    throw InvalidArgument("strategic_check: " + std::to_string(p) + "/" +
                          std::to_string(q) + " is not in lowest terms");
  }
  StrategicReport report;
  report.xi_num = p;
  report.xi_den = q;
  for (std::int64_t m = 0; m <= 2 * q; ++m) {
    if (((2 * m + 1) * p) % (2 * q) == 0) {
      report.strategic = false;
      report.witness_m = static_cast<int>(m);
      return report;
    }
  }
  // sin(mu_m p/q) = sin(k pi / (2q)) with k = (2m+1) p mod 4q.
  double lower = 1.0;
  for (std::int64_t m = 0; m < 2 * q; ++m) {
    const std::int64_t k = ((2 * m + 1) * p) % (4 * q);
    const double s = std::abs(std::sin(std::numbers::pi * static_cast<double>(k) /
                                       (2.0 * static_cast<double>(q))));
    lower = std::min(lower, s);
  }
  report.strategic = true;
  report.lower_bound = lower;
  return report;
}

double observability_constant(const ControlRegion& region, double T, int M) {
  if (!(T > 0.0)) throw InvalidArgument("observability_constant: T must be > 0");
  const Gramian g = assemble_gramian(region, T, M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.entries,
                                                     Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

std::vector<int> invisible_modes(double xi, int M, double tol) {
  std::vector<int> out;
  for (int m = 0; m < M; ++m) {
    if (std::abs(std::sin(spatial_frequency(m) * xi)) < tol) out.push_back(m);
  }
  return out;
}

}  // namespace beamctl
