#include <cmath>
#include <random>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/errors.hpp"
#include "beamctl/observability.hpp"
#include "doctest.h"
#include "oracles/quadrature.hpp"
#include "oracles/rk4.hpp"

using namespace beamctl;
using doctest::Approx;

namespace {

ModalState unit_a(int M, int k) {
  ModalState s = ModalState::zero(M);
  s.a[k] = 1.0;
  return s;
}

ModalState random_state(int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModalState s = ModalState::zero(M);
  for (int m = 0; m < M; ++m) {
    s.a[m] = u(rng);
    s.beta[m] = u(rng);
  }
  return s;
}

ControlField single_term(int M, int mode, double w, bool sine, double amp = 1.0) {
  ControlField g = ControlField::zero(M);
  g.frequencies = {w};
  g.cos_amp = Eigen::MatrixXd::Zero(M, 1);
  g.sin_amp = Eigen::MatrixXd::Zero(M, 1);
  (sine ? g.sin_amp : g.cos_amp)(mode, 0) = amp;
  return g;
}

ControlField random_forcing(int M, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> w(0.0, temporal_frequency(M - 1));
  ControlField g = ControlField::zero(M);
  g.frequencies = {temporal_frequency(M / 2), w(rng), w(rng)};
  g.cos_amp = Eigen::MatrixXd::Zero(M, 3);
  g.sin_amp = Eigen::MatrixXd::Zero(M, 3);
  for (int m = 0; m < M; ++m) {
    for (int j = 0; j < 3; ++j) {
      g.cos_amp(m, j) = u(rng);
      g.sin_amp(m, j) = u(rng);
    }
  }
  return g;
}

oracle::ModalEndState rk4(const ModalState& s, const ControlField& g, double T) {
  std::vector<double> a(s.a.data(), s.a.data() + s.modes());
  std::vector<double> b(s.beta.data(), s.beta.data() + s.modes());
  return oracle::rk4_modal(a, b, [&](int m, double t) { return g.modal_value(m, t); }, T);
}

}  // namespace

TEST_CASE("homogeneous_eval") {
  const ModalState s = unit_a(1, 0);
  CHECK(homogeneous_eval(s, 1.0, 0.0) == Approx(1.0).epsilon(1e-15));
  CHECK(homogeneous_eval(s, 1.0, 2 * M_PI / temporal_frequency(0)) == Approx(1.0).epsilon(1e-13));

  const ModalState s1 = unit_a(2, 1);
  const double expect = std::cos(9 * temporal_frequency(0) * 0.3) * std::sin(3 * M_PI / 4);
  CHECK(homogeneous_eval(s1, 0.5, 0.3) == Approx(expect).epsilon(1e-13));
  const auto end = rk4(s1, ControlField::zero(2), 0.3);
  CHECK(std::abs(homogeneous_eval(s1, 0.5, 0.3) - end.a[1] * std::sin(3 * M_PI / 4)) < 1e-6);
}

TEST_CASE("free evolution conserves modal energy") {
  std::mt19937_64 rng(1);
  const ModalState s = random_state(10, rng);
  for (double t : {0.1, 1.0, 2.0, 17.3}) {
    const ModalState st = homogeneous_state(s, t);
    for (int m = 0; m < 10; ++m) {
      const double e0 = s.a[m] * s.a[m] + s.beta[m] * s.beta[m];
      const double e1 = st.a[m] * st.a[m] + st.beta[m] * st.beta[m];
      CHECK(std::abs(e1 - e0) <= 1e-12);
    }
    const ModalState d = duhamel_solve(s, ControlField::zero(10), t, 10);
    CHECK((d - st).a.cwiseAbs().maxCoeff() < 1e-14);
    CHECK((d - st).beta.cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("resonant forcing grows secularly") {
  const int M = 2;
  const double w0 = temporal_frequency(0);
  const ControlField g = single_term(M, 0, w0, false);
  for (double T : {0.5, 2.0, 3.3}) {
    const ModalState out = duhamel_solve(ModalState::zero(M), g, T, M);
    // y'' + w^2 y = cos(w t) from rest: y = t sin(w t) / (2 w)
    CHECK(out.a[0] == Approx(T * std::sin(w0 * T) / (2 * w0)).epsilon(1e-12));
    const auto ref = rk4(ModalState::zero(M), g, T);
    CHECK(std::abs(out.a[0] - ref.a[0]) < 1e-6);
    CHECK(std::abs(out.beta[0] - ref.beta[0]) < 1e-6);
  }
}

TEST_CASE("non-resonant and random forcing against RK4") {
  const int M = 2;
  const ControlField g = single_term(M, 0, temporal_frequency(1), true);
  const ModalState out = duhamel_solve(ModalState::zero(M), g, 2.0, M);
  const auto ref = rk4(ModalState::zero(M), g, 2.0);
  CHECK(std::abs(out.a[0] - ref.a[0]) < 1e-6);
  CHECK(std::abs(out.beta[0] - ref.beta[0]) < 1e-6);
  CHECK(out.a[1] == 0.0);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 3; ++trial) {
    const ModalState s = random_state(5, rng);
    const ControlField f = random_forcing(5, rng);
    const ModalState got = duhamel_solve(s, f, 2.0, 5);
    const auto want = rk4(s, f, 2.0);
    for (int m = 0; m < 5; ++m) {
      CHECK(std::abs(got.a[m] - want.a[m]) < 1e-6);
      CHECK(std::abs(got.beta[m] - want.beta[m]) < 1e-6);
    }
  }
}

TEST_CASE("Duhamel is linear in the forcing") {
  std::mt19937_64 rng(4);
  const ControlField g = random_forcing(6, rng);
  const ControlField h = random_forcing(6, rng);
  ControlField sum = g;
  sum.frequencies.insert(sum.frequencies.end(), h.frequencies.begin(), h.frequencies.end());
  sum.cos_amp.conservativeResize(6, 6);
  sum.sin_amp.conservativeResize(6, 6);
  sum.cos_amp.rightCols(3) = h.cos_amp;
  sum.sin_amp.rightCols(3) = h.sin_amp;
  const ModalState zero = ModalState::zero(6);
  const ModalState lhs = duhamel_solve(zero, sum, 2.0, 6);
  const ModalState rhs = duhamel_solve(zero, g, 2.0, 6) + duhamel_solve(zero, h, 2.0, 6);
  CHECK((lhs - rhs).a.cwiseAbs().maxCoeff() < 1e-10);
  CHECK((lhs - rhs).beta.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("trajectory matches the Duhamel end state") {
  std::mt19937_64 rng(6);
  const ModalState s = random_state(6, rng);
  const ControlField g = random_forcing(6, rng);
  const auto traj = trajectory(s, g, 6);
  const ModalState end = duhamel_solve(s, g, 1.7, 6);
  for (int m = 0; m < 6; ++m) {
    CHECK(traj[m](1.7) == Approx(end.a[m]).epsilon(1e-10).scale(1.0));
    CHECK(traj[m].derivative()(1.7) / temporal_frequency(m) ==
          Approx(end.beta[m]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("sampled forcing") {
  const int M = 4;
  std::mt19937_64 rng(8);
  ControlField g = random_forcing(M, rng);
  g.attach_samples(2.0, 4001);
  for (int m = 0; m < M; ++m) {
    for (int k = 0; k < 4001; k += 97) {
      const double t = 2.0 * k / 4000;
      const double exact = g.modal_series(m)(t);
      CHECK(std::abs(g.sampled->values(m, k) - exact) <= 1e-9 * std::max(1.0, std::abs(exact)));
    }
  }
  const ModalState exact = duhamel_solve(ModalState::zero(M), g, 2.0, M);
  ControlField only = g;
  only.frequencies.clear();
  only.cos_amp.resize(M, 0);
  only.sin_amp.resize(M, 0);
  const ModalState approx = duhamel_solve(ModalState::zero(M), only, 2.0, M);
  CHECK((approx - exact).a.cwiseAbs().maxCoeff() < 1e-4);

  ControlField coarse = random_forcing(M, rng);
  coarse.attach_samples(2.0, 50);
  coarse.frequencies.clear();
  coarse.cos_amp.resize(M, 0);
  coarse.sin_amp.resize(M, 0);
  CHECK_THROWS_AS(duhamel_solve(ModalState::zero(M), coarse, 2.0, M), AccuracyError);
}

TEST_CASE("traces") {
  const TraceSignal tr = trace(unit_a(1, 0), 1.0, 2.0, 101);
  for (int k = 0; k < tr.grid_size(); ++k) {
    CHECK(tr.samples[k] == Approx(std::cos(temporal_frequency(0) * tr.time(k))).epsilon(1e-12).scale(1.0));
  }
  const TraceSignal hidden = trace(unit_a(2, 1), 2.0 / 3.0, 2.0, 101);
  for (double v : hidden.samples) CHECK(std::abs(v) < 1e-14);
  const TraceSignal dx = trace_dx(unit_a(1, 0), 1.0, 2.0, 101);
  for (double v : dx.samples) CHECK(std::abs(v) < 1e-14);

  std::mt19937_64 rng(2);
  const ModalState s = random_state(8, rng);
  for (double v : trace(s, 0.0, 2.0, 64).samples) CHECK(v == 0.0);
  for (double v : trace_dx(s, 1.0, 2.0, 64).samples) CHECK(std::abs(v) < 1e-11);

  CHECK_THROWS_AS(TraceSignal(1.0, {1.0}), InvalidArgument);
  CHECK_THROWS_AS(TraceSignal(1.0, {1.0, NAN}), InvalidArgument);
  CHECK(default_trace_grid(16, 2.0) >= kDefaultTraceGrid);
}

TEST_CASE("spatial overlap") {
  // closed form and quadrature give 0.0783849; the often-quoted 0.0783830 is
  // off in the sixth digit
  CHECK(std::abs(spatial_overlap(0, 0, InternalRegion{0.25, 4}) - 0.0783830) < 3e-6);
  CHECK(spatial_overlap(0, 0, InternalRegion{0.25, 4}) ==
        Approx(oracle::simpson([](double x) { return std::pow(std::sin(M_PI * x / 2), 2); },
                               0.25, 0.5, 1e-14))
            .epsilon(1e-12));
  const double mu0 = spatial_frequency(0);
  const double h = 0.25;
  CHECK(spatial_overlap(0, 0, InternalRegion{0.25, 4}) ==
        Approx(h / 2 - (std::sin(2 * mu0 * (0.25 + h)) - std::sin(2 * mu0 * 0.25)) / (4 * mu0))
            .epsilon(1e-14));
  CHECK(spatial_overlap(0, 1, PointwiseRegion{0.5}) == Approx(0.5).epsilon(1e-15));
  CHECK(window_overlap(3, 5, 0.4, 0.4) == 0.0);
  CHECK_THROWS_AS(spatial_overlap(0, 0, InternalRegion{0.8, 4}), InvalidRegion);

  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> mode(0, 40);
  std::uniform_int_distribution<int> ns(1, 60);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 300; ++k) {
    const int n = ns(rng);
    const double xi = u(rng) * (1.0 - 1.0 / n);
    const int m = mode(rng), mp = mode(rng);
    const InternalRegion r{xi, n};
    CHECK(spatial_overlap(m, mp, r) == spatial_overlap(mp, m, r));
    CHECK(spatial_overlap(m, m, r) == window_mass(m, xi, n));
    const double ref = oracle::gauss_kronrod(
        [&](double x) { return std::sin(spatial_frequency(m) * x) * std::sin(spatial_frequency(mp) * x); },
        xi, xi + 1.0 / n, 1e-14, 8);
    CHECK(std::abs(spatial_overlap(m, mp, r) - ref) <= 1e-12);
  }
}

TEST_CASE("time overlap") {
  const double w0 = temporal_frequency(0);
  CHECK(time_overlap(OverlapKind::CC, w0, w0, 2.0) ==
        Approx(1 + std::sin(4 * w0) / (4 * w0)).epsilon(1e-14));
  CHECK(time_overlap(OverlapKind::CC, w0, w0, 2.0) == Approx(0.956401).epsilon(1e-6));
  const double w = 3.7;
  CHECK(std::abs(time_overlap(OverlapKind::CS, w, w, 2 * M_PI / w)) < 1e-14);
  CHECK(time_overlap(OverlapKind::SS, 0.0, 5.0, 3.0) == 0.0);
  CHECK(time_overlap(OverlapKind::CC, 0.0, 0.0, 3.0) == Approx(3.0));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 600.0);
  for (int k = 0; k < 300; ++k) {
    const double a = u(rng);
    const double b = k % 5 == 0 ? a * (1 + 1e-12) : u(rng);
    const double T = 0.5 + u(rng) / 200;
    for (OverlapKind kind : {OverlapKind::CC, OverlapKind::CS, OverlapKind::SS}) {
      auto f = [&](double t) {
        const double x = kind == OverlapKind::SS ? std::sin(a * t) : std::cos(a * t);
        const double y = kind == OverlapKind::CC ? std::cos(b * t) : std::sin(b * t);
        return x * y;
      };
      const double ref = oracle::gauss_kronrod(f, 0, T, 1e-12, 256);
      CHECK(std::abs(time_overlap(kind, a, b, T) - ref) <= 1e-11 * std::max(1.0, T));
    }
  }
}

TEST_CASE("window energy is bounded independently of n") {
  std::mt19937_64 rng(14);
  const int M = 8;
  const ModalState s = random_state(M, rng);
  const ControlField g = random_forcing(M, rng);
  const double T = 2.0;
  double g_norm = 0.0;
  for (int m = 0; m < M; ++m) g_norm += 0.5 * l2_norm_squared(g.modal_series(m), T);
  const double rhs = g_norm + squared_norm(s, SpaceTag::l2());
  double worst = 0.0;
  for (int n : {2, 4, 8, 16, 32, 64, 128}) {
    worst = std::max(worst, window_energy(s, g, InternalRegion{0.3, n}, T) / rhs);
  }
  CHECK(worst < 10.0);

  // against a 2D quadrature of the field
  const auto traj = trajectory(s, g, M);
  auto u = [&](double x, double t) {
    double v = 0.0;
    for (int m = 0; m < M; ++m) v += traj[m](t) * std::sin(spatial_frequency(m) * x);
    return v * v;
  };
  const double ref = 4 * oracle::gauss_kronrod_2d(u, 0.3, 0.55, 0, T, 1e-10, 1, 16);
  CHECK(window_energy(s, g, InternalRegion{0.3, 4}, T) == Approx(ref).epsilon(1e-8));
}

TEST_CASE("evolve_to_final") {
  CHECK(evolve_to_final(ModalState::zero(3), ControlField::zero(3), 2.0).residual == 0.0);
  std::mt19937_64 rng(15);
  const ModalState s = random_state(7, rng);
  CHECK(evolve_to_final(s, ControlField::zero(7), 2.0).residual ==
        Approx(norm(s, SpaceTag::l2())).epsilon(1e-13));
}
