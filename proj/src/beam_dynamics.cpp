#include "beamctl/beam_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "beamctl/errors.hpp"
#include "beamctl/kernels.hpp"

namespace beamctl {
namespace {

bool resonant(double w, double wp) {
  return std::abs(w - wp) <
         kResonanceTolerance * std::max({std::abs(w), std::abs(wp), 1.0});
}

// int_0^T cos(x t) dt with the degenerate branch below `tol`.
double cos_integral(double x, double T, double tol) {
  if (std::abs(x) < tol) return T;
  return std::sin(x * T) / x;
}

// int_0^T sin(x t) dt = 2 sin^2(x T / 2) / x.
double sin_integral(double x, double T, double tol) {
  if (std::abs(x) < tol) return 0.5 * x * T * T;
  const double h = std::sin(0.5 * x * T);
  return 2.0 * h * h / x;
}

struct ModalIntegrals {
  double against_cos = 0.0;  // int_0^T cos(w s) g(s) ds
  double against_sin = 0.0;  // int_0^T sin(w s) g(s) ds
};

ModalIntegrals closed_form_integrals(const ControlField& f, int m, double w,
                                     double T) {
  ModalIntegrals out;
  for (std::size_t j = 0; j < f.frequencies.size(); ++j) {
    const double wj = f.frequencies[j];
    const double c = f.cos_amp(m, static_cast<Eigen::Index>(j));
    const double s = f.sin_amp(m, static_cast<Eigen::Index>(j));
    if (c != 0.0) {
      out.against_cos += c * time_overlap(OverlapKind::CC, w, wj, T);
      out.against_sin += c * time_overlap(OverlapKind::CS, wj, w, T);
    }
    if (s != 0.0) {
      out.against_cos += s * time_overlap(OverlapKind::CS, w, wj, T);
      out.against_sin += s * time_overlap(OverlapKind::SS, w, wj, T);
    }
  }
  return out;
}

// Piecewise-linear interpolation of g integrated exactly against cos/sin.
ModalIntegrals filon_integrals(const ControlField::Sampled& s, int m, double w,
                               double T) {
  const Eigen::Index n = s.values.cols();
  const double h = s.T / static_cast<double>(n - 1);
  const double i0 = cos_moment(0, w, h);
  const double i1 = cos_moment(1, w, h);
  const double j0 = sin_moment(0, w, h);
  const double j1 = sin_moment(1, w, h);
  ModalIntegrals out;
  const Eigen::Index panels =
      std::min<Eigen::Index>(n - 1, static_cast<Eigen::Index>(std::llround(T / h)));
  for (Eigen::Index k = 0; k < panels; ++k) {
    const double tk = h * static_cast<double>(k);
    const double g0 = s.values(m, k);
    const double slope = (s.values(m, k + 1) - g0) / h;
    const double ck = std::cos(w * tk);
    const double sk = std::sin(w * tk);
    out.against_cos += g0 * (ck * i0 - sk * j0) + slope * (ck * i1 - sk * j1);
    out.against_sin += g0 * (sk * i0 + ck * j0) + slope * (sk * i1 + ck * j1);
  }
  return out;
}

}  // namespace

TraceSignal::TraceSignal(double horizon, std::vector<double> values,
                         std::optional<TrigSeries> series)
    : T(horizon), samples(std::move(values)), closed_form(std::move(series)) {
  if (samples.size() < 2) throw InvalidArgument("TraceSignal: grid_size < 2");
  for (double v : samples) {
    if (!std::isfinite(v)) throw InvalidArgument("TraceSignal: non-finite sample");
  }
}

TraceSignal sample_signal(const TrigSeries& series, double T, int grid) {
  if (grid < 2) throw InvalidArgument("sample_signal: grid must be >= 2");
  return TraceSignal(T, kernels::sample_series(series, T, grid), series);
}

int default_trace_grid(int M, double T) {
  const double periods = temporal_frequency(M - 1) * T / (2.0 * std::numbers::pi);
  return std::max(kDefaultTraceGrid, static_cast<int>(std::ceil(20.0 * periods)) + 1);
}

ControlField ControlField::zero(int M) {
  ControlField f;
  f.cos_amp = Eigen::MatrixXd::Zero(M, 0);
  f.sin_amp = Eigen::MatrixXd::Zero(M, 0);
  return f;
}

int ControlField::modes() const {
  if (frequencies.empty() && sampled) return static_cast<int>(sampled->values.rows());
  return static_cast<int>(cos_amp.rows());
}

ControlField ControlField::negated() const {
  ControlField out = *this;
  out.cos_amp = -cos_amp;
  out.sin_amp = -sin_amp;
  if (out.sampled) out.sampled->values = -sampled->values;
  if (out.source) out.source->gain = -source->gain;
  return out;
}

double ControlField::modal_value(int m, double t) const {
  if (frequencies.empty() && sampled) {
    const auto n = sampled->values.cols();
    const double h = sampled->T / static_cast<double>(n - 1);
    const double pos = std::clamp(t / h, 0.0, static_cast<double>(n - 1));
    const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(pos), n - 2);
    const double frac = pos - static_cast<double>(k);
    return (1.0 - frac) * sampled->values(m, k) + frac * sampled->values(m, k + 1);
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    sum += cos_amp(m, jj) * std::cos(frequencies[j] * t) +
           sin_amp(m, jj) * std::sin(frequencies[j] * t);
  }
  return sum;
}

TrigSeries ControlField::modal_series(int m) const {
  if (frequencies.empty() && sampled) {
    throw std::logic_error("modal_series: field has only sampled data");
  }
  TrigSeries s;
  for (std::size_t j = 0; j < frequencies.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (cos_amp(m, jj) != 0.0) s.add(cos_amp(m, jj), frequencies[j], Phase::Cos);
    if (sin_amp(m, jj) != 0.0) s.add(sin_amp(m, jj), frequencies[j], Phase::Sin);
  }
  return s;
}

double ControlField::field_value(double x, double t) const {
  if (!source || !region || !is_internal(*region)) {
    throw std::logic_error("field_value: needs a synthesized internal control");
  }
  const auto& r = std::get<InternalRegion>(*region);
  if (x < r.xi || x > r.xi + r.width()) return 0.0;
  return source->gain * homogeneous_eval(source->adjoint, x, t);
}

TrigSeries ControlField::point_signal() const {
  if (!source || !region || is_internal(*region)) {
    throw std::logic_error("point_signal: needs a synthesized pointwise control");
  }
  return trace_series(source->adjoint, region_point(*region)).scaled(source->gain);
}

void ControlField::attach_samples(double T, int grid) {
  if (grid < 2) throw InvalidArgument("attach_samples: grid must be >= 2");
  Sampled s;
  s.T = T;
  s.values.resize(modes(), grid);
  for (int m = 0; m < modes(); ++m) {
    for (int k = 0; k < grid; ++k) {
      s.values(m, k) = modal_value(m, T * k / (grid - 1));
    }
  }
  sampled = std::move(s);
}

double homogeneous_eval(const ModalState& state0, double x, double t) {
  double sum = 0.0;
  for (int m = 0; m < state0.modes(); ++m) {
    const double w = temporal_frequency(m);
    sum += (state0.a[m] * std::cos(w * t) + state0.beta[m] * std::sin(w * t)) *
           std::sin(spatial_frequency(m) * x);
  }
  return sum;
}

ModalState homogeneous_state(const ModalState& state0, double t) {
  ModalState out = state0;
  for (int m = 0; m < state0.modes(); ++m) {
    const double w = temporal_frequency(m);
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    out.a[m] = c * state0.a[m] + s * state0.beta[m];
    out.beta[m] = -s * state0.a[m] + c * state0.beta[m];
  }
  return out;
}

ModalState duhamel_solve(const ModalState& state0, const ControlField& forcing,
                         double T, int M) {
  if (state0.modes() != M) {
    throw InvalidArgument("duhamel_solve: state truncation differs from M");
  }
  if (forcing.modes() < M) {
    throw InvalidArgument("duhamel_solve: forcing has fewer than M modes");
  }
  const bool sampled_only = forcing.frequencies.empty() && forcing.sampled;
  if (sampled_only) {
    const auto n = forcing.sampled->values.cols();
    const double h = forcing.sampled->T / static_cast<double>(n - 1);
    const double shortest = 2.0 * std::numbers::pi / temporal_frequency(M - 1);
    if (shortest / h < 10.0) {
      throw AccuracyError("duhamel_solve: sampled forcing has " +
                          std::to_string(shortest / h) +
                          " samples per shortest period (need >= 10)");
    }
    if (forcing.sampled->T + 0.5 * h < T) {
      throw InvalidArgument("duhamel_solve: sampled forcing shorter than T");
    }
  }
  ModalState out = ModalState::zero(M);
  for (int m = 0; m < M; ++m) {
    const double w = temporal_frequency(m);
    const ModalIntegrals g = sampled_only
                                 ? filon_integrals(*forcing.sampled, m, w, T)
                                 : closed_form_integrals(forcing, m, w, T);
    const double x = state0.a[m] - g.against_sin / w;
    const double y = state0.beta[m] + g.against_cos / w;
    const double c = std::cos(w * T);
    const double s = std::sin(w * T);
    out.a[m] = c * x + s * y;
    out.beta[m] = -s * x + c * y;
  }
  return out;
}

double window_energy(const ModalState& state0, const ControlField& forcing,
                     const InternalRegion& region, double T) {
  validate(region);
  const int M = state0.modes();
  const std::vector<TrigSeries> y = trajectory(state0, forcing, M);
  double sum = 0.0;
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < M; ++j) {
      sum += spatial_overlap(m, j, region) * integrate_product(y[m], y[j], T);
    }
  }
  return region.n * sum;
}

std::vector<TrigSeries> homogeneous_trajectory(const ModalState& state0) {
  std::vector<TrigSeries> out(state0.modes());
  for (int m = 0; m < state0.modes(); ++m) {
    const double w = temporal_frequency(m);
    if (state0.a[m] != 0.0) out[m].add(state0.a[m], w, Phase::Cos);
    if (state0.beta[m] != 0.0) out[m].add(state0.beta[m], w, Phase::Sin);
  }
  return out;
}

std::vector<TrigSeries> trajectory(const ModalState& state0,
                                   const ControlField& forcing, int M) {
  if (state0.modes() != M) {
    throw InvalidArgument("trajectory: state truncation differs from M");
  }
  if (forcing.frequencies.empty() && forcing.sampled) {
    throw InvalidArgument("trajectory: needs trigonometric forcing");
  }
  if (forcing.modes() < M) {
    throw InvalidArgument("trajectory: forcing has fewer than M modes");
  }
  std::vector<TrigSeries> out = homogeneous_trajectory(state0);
  for (int m = 0; m < M; ++m) {
    const double w = temporal_frequency(m);
    TrigSeries& y = out[m];
    for (std::size_t j = 0; j < forcing.frequencies.size(); ++j) {
      const double wj = forcing.frequencies[j];
      const double c = forcing.cos_amp(m, static_cast<Eigen::Index>(j));
      const double s = forcing.sin_amp(m, static_cast<Eigen::Index>(j));
      if (resonant(w, wj)) {
        // y'' + w^2 y = cos(w t):  t sin(w t) / (2w)
        // y'' + w^2 y = sin(w t):  sin(w t) / (2w^2) - t cos(w t) / (2w)
        if (c != 0.0) y.add(c / (2.0 * w), w, Phase::Sin, 1);
        if (s != 0.0) {
          y.add(s / (2.0 * w * w), w, Phase::Sin);
          y.add(-s / (2.0 * w), w, Phase::Cos, 1);
        }
        continue;
      }
      const double denom = w * w - wj * wj;
      if (c != 0.0) {
        y.add(c / denom, wj, Phase::Cos);
        y.add(-c / denom, w, Phase::Cos);
      }
      if (s != 0.0 && wj != 0.0) {
        y.add(s / denom, wj, Phase::Sin);
        y.add(-s * wj / (w * denom), w, Phase::Sin);
      }
    }
    y = y.simplified();
  }
  return out;
}

TrigSeries trace_series(const ModalState& state0, double xi) {
  TrigSeries s;
  for (int m = 0; m < state0.modes(); ++m) {
    const double w = temporal_frequency(m);
    const double shape = std::sin(spatial_frequency(m) * xi);
    if (state0.a[m] != 0.0) s.add(state0.a[m] * shape, w, Phase::Cos);
    if (state0.beta[m] != 0.0) s.add(state0.beta[m] * shape, w, Phase::Sin);
  }
  return s;
}

TrigSeries trace_dx_series(const ModalState& state0, double xi) {
  TrigSeries s;
  for (int m = 0; m < state0.modes(); ++m) {
    const double w = temporal_frequency(m);
    const double mu = spatial_frequency(m);
    const double shape = mu * std::cos(mu * xi);
    if (state0.a[m] != 0.0) s.add(state0.a[m] * shape, w, Phase::Cos);
    if (state0.beta[m] != 0.0) s.add(state0.beta[m] * shape, w, Phase::Sin);
  }
  return s;
}

TraceSignal trace(const ModalState& state0, double xi, double T, int grid) {
  return sample_signal(trace_series(state0, xi), T, grid);
}

TraceSignal trace_dx(const ModalState& state0, double xi, double T, int grid) {
  return sample_signal(trace_dx_series(state0, xi), T, grid);
}

double window_overlap(int m, int mp, double lo, double hi) {
  const double h = hi - lo;
  const double mid = lo + 0.5 * h;
  const double mu = spatial_frequency(m);
  if (m == mp) {
    return 0.5 * h - std::sin(mu * h) * std::cos(2.0 * mu * mid) / (2.0 * mu);
  }
  const double mup = spatial_frequency(mp);
  // int_lo^hi cos(x s) ds = (2/x) cos(x mid) sin(x h / 2)
  auto window_cos = [&](double x) {
    return 2.0 * std::cos(x * mid) * std::sin(0.5 * x * h) / x;
  };
  return 0.5 * (window_cos(mu - mup) - window_cos(mu + mup));
}

double spatial_overlap(int m, int mp, const ControlRegion& region) {
  validate(region);
  if (const auto* r = std::get_if<InternalRegion>(&region)) {
    return window_overlap(m, mp, r->xi, r->xi + r->width());
  }
  const double xi = std::get<PointwiseRegion>(region).xi;
  return std::sin(spatial_frequency(m) * xi) * std::sin(spatial_frequency(mp) * xi);
}

double time_overlap(OverlapKind kind, double w, double wp, double T) {
  const double tol = kResonanceTolerance * std::max({std::abs(w), std::abs(wp), 1.0});
  switch (kind) {
    case OverlapKind::CC:
      return 0.5 * (cos_integral(w - wp, T, tol) + cos_integral(w + wp, T, tol));
    case OverlapKind::SS:
      return 0.5 * (cos_integral(w - wp, T, tol) - cos_integral(w + wp, T, tol));
    case OverlapKind::CS:
      return 0.5 * (sin_integral(wp + w, T, tol) + sin_integral(wp - w, T, tol));
  }
  return 0.0;
}

FinalState evolve_to_final(const ModalState& state0, const ControlField& control,
                           double T) {
  FinalState out;
  out.state = duhamel_solve(state0, control, T, state0.modes());
  out.residual = norm(out.state, SpaceTag::l2());
  return out;
}

}  // namespace beamctl
