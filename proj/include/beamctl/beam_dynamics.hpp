#pragma once

// Closed-form-in-time evolution of the modal beam system
//   y_m'' + omega_m^2 y_m = g_m(t),   g(x,t) = sum_m g_m(t) sin(mu_m x),
// plus point traces and the exact space/time overlap integrals used by the
// Gramian assembly.

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "beamctl/modal_space.hpp"
#include "beamctl/region.hpp"
#include "beamctl/time_series.hpp"

namespace beamctl {

/// Default horizon; the observability results hold for T >= 2.
inline constexpr double kDefaultHorizon = 2.0;
inline constexpr int kDefaultTraceGrid = 2048;

/// Frequencies closer than this (relative to max(w, w', 1)) are treated as
/// equal and use the secular/degenerate closed forms.
inline constexpr double kResonanceTolerance = 1e-9;

/// Uniform sampling of a scalar signal on [0, T].
struct TraceSignal {
  double T = 0.0;
  std::vector<double> samples;
  std::optional<TrigSeries> closed_form;

  TraceSignal() = default;
  TraceSignal(double horizon, std::vector<double> values,
              std::optional<TrigSeries> series = std::nullopt);

  int grid_size() const { return static_cast<int>(samples.size()); }
  double time(int k) const { return T * k / (grid_size() - 1); }
};

/// Samples `series` at `grid` uniform points of [0, T].
TraceSignal sample_signal(const TrigSeries& series, double T, int grid);

/// Trace grid that resolves the fastest of the first M modes: the larger of
/// 2048 and 20 samples per period of omega_{M-1}.
int default_trace_grid(int M, double T);

/// Modal forcing g_m(t) = sum_j C(m,j) cos(w_j t) + S(m,j) sin(w_j t),
/// optionally backed by a sampled fallback and, for synthesized HUM controls,
/// by the adjoint state that generated it.
struct ControlField {
  /// Empty for distributed test forcing that is not tied to a region.
  std::optional<ControlRegion> region;
  std::vector<double> frequencies;
  Eigen::MatrixXd cos_amp;  // modes x frequencies
  Eigen::MatrixXd sin_amp;

  struct Sampled {
    double T = 0.0;
    Eigen::MatrixXd values;  // modes x grid
  };
  std::optional<Sampled> sampled;

  /// Field = indicator(region) * gain * phi(x, t), phi the free evolution of
  /// `adjoint`. Present for controls built by synthesize_control().
  struct Source {
    ModalState adjoint;
    double gain = 1.0;
  };
  std::optional<Source> source;

  static ControlField zero(int M);

  int modes() const;
  bool has_closed_form() const { return !(frequencies.empty() && sampled); }
  ControlField negated() const;

  /// g_m(t), from the trigonometric form when present.
  double modal_value(int m, double t) const;
  TrigSeries modal_series(int m) const;

  /// Physical field g(x, t) of a synthesized internal control; exactly zero
  /// outside [xi, xi + 1/n]. Throws std::logic_error without a source or for
  /// pointwise regions.
  double field_value(double x, double t) const;

  /// v(t) for synthesized pointwise controls.
  TrigSeries point_signal() const;

  /// Attaches a uniform sampling of the modal coefficients on [0, T].
  void attach_samples(double T, int grid);
};

/// sum_m [a_m cos(w_m t) + beta_m sin(w_m t)] sin(mu_m x).
double homogeneous_eval(const ModalState& state0, double x, double t);

/// Free evolution of the modal state to time t (a rotation per mode).
ModalState homogeneous_state(const ModalState& state0, double t);

/// State at time T of the forced system started at state0. Trigonometric
/// forcing is integrated in closed form; sampled-only forcing uses a
/// piecewise-linear Filon rule and throws AccuracyError below 10 samples per
/// period of omega_{M-1}.
ModalState duhamel_solve(const ModalState& state0, const ControlField& forcing,
                         double T, int M);

/// Per-mode displacement y_m(t) as an exact trigonometric series (secular
/// t cos / t sin terms for resonant forcing). Requires the trigonometric form.
std::vector<TrigSeries> trajectory(const ModalState& state0,
                                   const ControlField& forcing, int M);

/// n int_0^T int_xi^{xi+1/n} u^2 dx dt for the forced solution u started at
/// state0, in closed form. Stays below C (||g||^2 + ||(u0, u1)||^2) with C
/// independent of n and T.
double window_energy(const ModalState& state0, const ControlField& forcing,
                     const InternalRegion& region, double T);

/// Per-mode free evolution a_m cos(w_m t) + beta_m sin(w_m t).
std::vector<TrigSeries> homogeneous_trajectory(const ModalState& state0);

/// Closed forms of phi(xi, t) and phi_x(xi, t).
TrigSeries trace_series(const ModalState& state0, double xi);
TrigSeries trace_dx_series(const ModalState& state0, double xi);

TraceSignal trace(const ModalState& state0, double xi, double T, int grid);
TraceSignal trace_dx(const ModalState& state0, double xi, double T, int grid);

/// int over [lo, hi] of sin(mu_m x) sin(mu_m' x) dx.
double window_overlap(int m, int mp, double lo, double hi);

/// Spatial factor of the control operator: window_overlap on
/// [xi, xi + 1/n] for Internal, sin(mu_m xi) sin(mu_m' xi) for Pointwise.
double spatial_overlap(int m, int mp, const ControlRegion& region);

enum class OverlapKind { CC, CS, SS };

/// int_0^T of cos(w t)cos(w' t) [CC], cos(w t) sin(w' t) [CS] or
/// sin(w t) sin(w' t) [SS].
double time_overlap(OverlapKind kind, double w, double wp, double T);

struct FinalState {
  ModalState state;
  double residual = 0.0;  // L^2 x V' norm of `state`
};

FinalState evolve_to_final(const ModalState& state0, const ControlField& control,
                           double T);

}  // namespace beamctl
