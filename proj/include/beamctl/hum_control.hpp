#pragma once

// Hilbert Uniqueness Method at truncation level.
//
// Adjoint data p = (a, beta) generates phi_p, the free evolution, and the
// control g = chi_window * n * phi_p (internal) or v(t) delta_xi with
// v = phi_p(xi, .) (pointwise). Integrating d/dt[(psi', phi_q) - (psi, phi_q')]
// = (g, phi_q) over [0, T] with psi(T) = psi'(T) = 0 gives, for every q,
//
//   (y0, phi_q^1) - (y1, phi_q^0) = q' Lambda p,
//
// with Lambda the Gramian of p -> n int_0^T int_window phi_p^2. So the
// control is +chi n phi_p with Lambda p = r, r_q the left-hand side.

#include <optional>

#include <Eigen/Core>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/modal_space.hpp"
#include "beamctl/region.hpp"
#include "json.hpp"

namespace beamctl {

/// Interleaved coordinates: index 2m <-> a_m, 2m+1 <-> beta_m.
Eigen::VectorXd to_vector(const ModalState& state);
ModalState from_vector(const Eigen::VectorXd& v);

struct Gramian {
  Eigen::MatrixXd entries;
  ControlRegion region;
  double T = 0.0;
  int M = 0;
  /// lambda_max / lambda_min; +inf when lambda_min <= 0.
  double condition_estimate = 0.0;

  int dim() const { return static_cast<int>(entries.rows()); }
  double quadratic_form(const ModalState& p) const;
};

Gramian assemble_gramian(const ControlRegion& region, double T, int M);

/// r_q = (y0, phi_q^1) - (y1, phi_q^0) over the canonical adjoint basis.
Eigen::VectorXd pairing_vector(const ModalState& y);

struct ControlProblem {
  ControlRegion region = PointwiseRegion{0.5};
  double T = kDefaultHorizon;
  ModalState initial_data;
  int M = 16;
  /// Tikhonov shift; defaults to 1e-10 trace(Lambda) / dim.
  std::optional<double> regularization;
  double tolerance = 1e-6;
};

struct HumDiagnostics {
  double condition_estimate = 0.0;
  double regularization = 0.0;
  /// ||(Lambda + eps) p - r|| / ||r|| after refinement.
  double solve_residual = 0.0;
  /// ||Lambda p - r|| / ||r||, includes the Tikhonov bias.
  double gramian_residual = 0.0;
  /// p' Lambda p.
  double energy = 0.0;
  int refinement_steps = 0;
};

struct HumSolution {
  ModalState adjoint0;
  HumDiagnostics diagnostics;
  Gramian gramian;
};

/// Solves (Lambda + eps I) p = r by Cholesky with iterative refinement
/// (residuals accumulated in long double). With eps = 0 and
/// lambda_min <= 1e-12 lambda_max, throws NonInvertibleGramian naming the
/// mode that dominates the near-null eigenvector.
HumSolution solve_hum(const ControlProblem& problem);

ControlField synthesize_control(const ModalState& adjoint0,
                                const ControlRegion& region, double T);

/// int_0^T int_0^1 g phi_p dx dt for a trigonometric control and adjoint data p.
double control_adjoint_product(const ControlField& control, const ModalState& p,
                               double T);

/// int int |g|^2 for synthesized internal controls, int v^2 for pointwise.
double control_energy(const ControlField& control, double T);

/// Relative gap |(y0, phi^1) - (y1, phi^0) - int int g phi| / |int int g phi|
/// for the control g built from `adjoint`. Empty when the energy vanishes.
std::optional<double> hum_identity_check(const ModalState& y, const ModalState& adjoint,
                                         const ControlRegion& region, double T);

struct NullControlReport {
  ModalState final_state;
  double final_residual = 0.0;     // ||final||_{L2 x V'}
  double relative_residual = 0.0;  // final_residual / ||initial||, 0 if initial = 0
  /// |pairing - int int g phi| / int int g phi; empty when not applicable.
  std::optional<double> hum_identity_error;
  /// +1 when the control is applied as given, -1 when its negation steers
  /// closer to rest.
  int sign = 1;
};

NullControlReport verify_null_control(const ControlProblem& problem,
                                      const ControlField& control);

nlohmann::json region_to_json(const ControlRegion& region);
ControlRegion region_from_json(const nlohmann::json& j);
nlohmann::json gramian_to_json(const Gramian& g);
Gramian gramian_from_json(const nlohmann::json& j);
nlohmann::json solution_to_json(const HumSolution& s);

}  // namespace beamctl
