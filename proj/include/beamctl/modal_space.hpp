#pragma once

// Modal basis sin(mu_m x), mu_m = (2m+1)pi/2, of the clamped/free beam
// u(0) = u_x(1) = u_xx(0) = u_xxx(1) = 0, and the weighted sequence norms
// built on it.
//
// A beam state is stored in energy-normalized coordinates:
//   u(x)   = sum_m a_m sin(mu_m x)
//   u_t(x) = sum_m omega_m beta_m sin(mu_m x),     omega_m = mu_m^2
// so that the free evolution is a_m cos(omega_m t) + beta_m sin(omega_m t)
// and the L^2 x V' data norm is 1/2 sum (a_m^2 + beta_m^2).

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace beamctl {

inline double spatial_frequency(int m) {
  return (2.0 * m + 1.0) * std::numbers::pi / 2.0;
}

inline double temporal_frequency(int m) {
  const double mu = spatial_frequency(m);
  return mu * mu;
}

struct FrequencyTable {
  std::vector<double> mu;
  std::vector<double> omega;

  int size() const { return static_cast<int>(mu.size()); }
};

/// Frequencies of the first M modes. Throws InvalidArgument for M < 1.
FrequencyTable frequencies(int M);

struct ModalState {
  Eigen::VectorXd a;
  Eigen::VectorXd beta;

  ModalState() = default;
  ModalState(Eigen::VectorXd a_in, Eigen::VectorXd beta_in);

  static ModalState zero(int M);
  int modes() const { return static_cast<int>(a.size()); }
  bool is_zero() const;
};

ModalState operator+(const ModalState& lhs, const ModalState& rhs);
ModalState operator-(const ModalState& lhs, const ModalState& rhs);
ModalState operator*(double s, const ModalState& state);

/// Displacement space that names a data-pair norm. For a pair (u0, u1):
///   L2    -> L^2 x V'          weights 1
///   V     -> V x L^2           weights mu^4
///   D4    -> D(d^4) x V        weights mu^8
///   Vdual -> V' x D(d^4)'      weights mu^-4
///   F     -> xi-weighted       weights sin^2(mu xi)
///   Fdual -> dual of F         weights 1 / sin^2(mu xi)
enum class Space { L2, V, Vdual, D4, F, Fdual };

struct SpaceTag {
  Space space = Space::L2;
  double xi = 0.0;  // only read for F / Fdual

  static SpaceTag l2() { return {Space::L2, 0.0}; }
  static SpaceTag v() { return {Space::V, 0.0}; }
  static SpaceTag vdual() { return {Space::Vdual, 0.0}; }
  static SpaceTag d4() { return {Space::D4, 0.0}; }
  static SpaceTag f(double xi) { return {Space::F, xi}; }
  static SpaceTag fdual(double xi) { return {Space::Fdual, xi}; }
};

/// Squared data norm of a state in the pair space named by `tag`.
/// Fdual throws DegenerateWeight if |sin(mu_m xi)| <= 1e-12 max(1, mu_m) for
/// some m < M (a zero up to rounding).
double squared_norm(const ModalState& state, const SpaceTag& tag);
inline double norm(const ModalState& state, const SpaceTag& tag) {
  return std::sqrt(squared_norm(state, tag));
}

/// Squared norm of a single function given by its sine coefficients.
/// F / Fdual are pair-only and rejected here.
double squared_component_norm(std::span<const double> coeffs, Space space);

/// Sine coefficients c_m = 2 int_0^1 f(x) sin(mu_m x) dx by composite
/// Gauss-Legendre quadrature. Panels are at most a quarter wavelength of
/// sin(2 mu_{M-1} x); `quadrature_points` is a floor on the total node count
/// and must be at least 2M + 2.
std::vector<double> project(const std::function<double(double)>& f, int M,
                            int quadrature_points);

/// Applies (d^4/dx^4)^{-1} mode-wise: divides a_m and beta_m by mu_m^4.
ModalState smooth(const ModalState& state);
/// Inverse of smooth(): multiplies by mu_m^4.
ModalState unsmooth(const ModalState& state);

double reconstruct(std::span<const double> coeffs, double x);
double reconstruct_dx(std::span<const double> coeffs, double x);

inline double reconstruct(const Eigen::VectorXd& coeffs, double x) {
  return reconstruct(std::span<const double>(coeffs.data(), coeffs.size()), x);
}
inline double reconstruct_dx(const Eigen::VectorXd& coeffs, double x) {
  return reconstruct_dx(std::span<const double>(coeffs.data(), coeffs.size()),
                        x);
}

/// L^2(0,1) inner products of the displacement/velocity fields of two states,
/// used by the HUM duality pairing.
double displacement_inner(const ModalState& lhs, const ModalState& rhs);
double velocity_inner(const ModalState& lhs, const ModalState& rhs);

/// (y0, phi1) - (y1, phi0) with L^2(0,1) pairings.
double duality_pairing(const ModalState& y, const ModalState& phi);

}  // namespace beamctl
