#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "beamctl/region.hpp"

namespace beamctl {

/// int_xi^{xi+1/n} sin^2(mu_m x) dx in closed form. Always in [0, 1/n].
double window_mass(int m, double xi, int n);

/// 1/(2n) - sin(pi/(2n))/pi, the claimed uniform-in-m lower bound of
/// window_mass. It is checked, not trusted: see window_mass_diagnostics().
double window_mass_lower_bound(int n);

struct WindowMassRow {
  int m = 0;
  double mass = 0.0;
  double lower_bound = 0.0;
  double scaled_mass = 0.0;  // n * mass
  bool bound_violated = false;
};

struct WindowMassDiagnostics {
  std::vector<WindowMassRow> rows;
  double infimum = 0.0;
  int argmin_m = 0;
  int violations = 0;
};

WindowMassDiagnostics window_mass_diagnostics(double xi, int n, int m_count);

/// I(b,t) = int_0^1 sin^2(pi (b + t z)) dz
///        = 1/2 (1 - sin(pi t)/(pi t) cos(pi (2b + t))),
/// expanded to first order about the t -> 0 limit sin^2(pi b) for t < 1e-8.
/// Clamped to [0,1].
double overlap_kernel(double b, double t);

/// Uniform constant in I(b,t) >= c sin^2(pi b): the smallest of the three
/// case constants 1/2(1 - 2/pi), 1/3 and 7/24.
inline constexpr double kInverseBoundConstant = 0.5 * (1.0 - 2.0 / std::numbers::pi);

struct InverseBoundResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

InverseBoundResult inverse_bound_check(double b, double t);

/// xi = p/q is strategic iff sin((2m+1) pi xi / 2) != 0 for every m.
struct StrategicReport {
  std::int64_t xi_num = 0;
  std::int64_t xi_den = 1;
  bool strategic = false;
  std::optional<int> witness_m;
  /// Uniform lower bound on |sin(mu_m xi)| over all m.
  std::optional<double> lower_bound;

  double xi() const { return static_cast<double>(xi_num) / static_cast<double>(xi_den); }
};

/// Searches (2m+1) p = 0 mod 2q over m in [0, 2q]; the residues of (2m+1) p
/// mod 4q repeat with period <= 2q, so the search is exhaustive and the
/// minimum of |sin| over one cycle is a true uniform bound.
/// Throws InvalidArgument unless 0 < p < q and gcd(p, q) = 1.
StrategicReport strategic_check(std::int64_t p, std::int64_t q);

/// Smallest eigenvalue of the truncated observability Gramian.
double observability_constant(const ControlRegion& region, double T, int M);

/// Modes m < M with |sin(mu_m xi)| below `tol` (invisible from xi).
std::vector<int> invisible_modes(double xi, int M, double tol = 1e-8);

}  // namespace beamctl
