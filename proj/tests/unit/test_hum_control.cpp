#include <cmath>
#include <random>

#include "beamctl/errors.hpp"
#include <Eigen/Eigenvalues>

#include "beamctl/hum_control.hpp"
#include "beamctl/observability.hpp"
#include "doctest.h"
#include "oracles/quadrature.hpp"

using namespace beamctl;
using doctest::Approx;

namespace {

ModalState smooth_decay(int M) {
  ModalState s = ModalState::zero(M);
  for (int m = 0; m < M; ++m) s.a[m] = 1.0 / ((m + 1.0) * (m + 1.0));
  return s;
}

ModalState random_state(int M, std::mt19937_64& rng, double decay = 1.0) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ModalState s = ModalState::zero(M);
  for (int m = 0; m < M; ++m) {
    const double w = std::pow(m + 1.0, -decay);
    s.a[m] = u(rng) * w;
    s.beta[m] = u(rng) * w;
  }
  return s;
}

double eig_min(const Eigen::MatrixXd& A) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(A, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .minCoeff();
}

}  // namespace

TEST_CASE("single-mode Gramians") {
  const double T = 2 * M_PI / temporal_frequency(0);
  const Gramian p = assemble_gramian(PointwiseRegion{1.0}, T, 1);
  CHECK(p.dim() == 2);
  CHECK(p.entries(0, 0) == Approx(M_PI / temporal_frequency(0)).epsilon(1e-13));
  CHECK(p.entries(1, 1) == Approx(M_PI / temporal_frequency(0)).epsilon(1e-13));
  CHECK(std::abs(p.entries(0, 1)) < 1e-14);

  const Gramian in = assemble_gramian(InternalRegion{0.25, 4}, T, 1);
  const double expect = 4 * window_mass(0, 0.25, 4) * M_PI / temporal_frequency(0);
  CHECK(in.entries(0, 0) == Approx(expect).epsilon(1e-13));
  CHECK(in.entries(1, 1) == Approx(expect).epsilon(1e-13));

  const Gramian hidden = assemble_gramian(PointwiseRegion{2.0 / 3.0}, 1.3, 2);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(hidden.entries(2, j)) < 1e-14);
    CHECK(std::abs(hidden.entries(3, j)) < 1e-14);
  }
}

TEST_CASE("Gramians are symmetric PSD and match quadrature of the observed energy") {
  std::mt19937_64 rng(41);
  const int M = 6;
  const double T = 2.0;
  for (const ControlRegion& region :
       {ControlRegion{InternalRegion{1.0 / 3.0, 5}}, ControlRegion{PointwiseRegion{0.41}}}) {
    const Gramian g = assemble_gramian(region, T, M);
    const double scale = g.entries.cwiseAbs().maxCoeff();
    CHECK((g.entries - g.entries.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(eig_min(g.entries) >= -1e-10 * scale);
    for (int k = 0; k < 4; ++k) {
      const ModalState p = random_state(M, rng);
      double ref = 0.0;
      if (const auto* r = std::get_if<InternalRegion>(&region)) {
        ref = r->n * oracle::gauss_kronrod_2d(
                         [&](double t, double x) { return std::pow(homogeneous_eval(p, x, t), 2); },
                         0, T, r->xi, r->xi + r->width(), 1e-11, 32, 1);
      } else {
        const double xi = std::get<PointwiseRegion>(region).xi;
        ref = oracle::gauss_kronrod(
            [&](double t) { return std::pow(homogeneous_eval(p, xi, t), 2); }, 0, T, 1e-13, 64);
      }
      CHECK(g.quadratic_form(p) == Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("solve_hum basics") {
  const ControlProblem zero{PointwiseRegion{0.5}, 2.0, ModalState::zero(4), 4, 1e-10, 1e-6};
  CHECK(solve_hum(zero).adjoint0.is_zero());

  const double T = 2 * M_PI / temporal_frequency(0);
  ModalState y = ModalState::zero(1);
  y.a[0] = 1.0;
  const ControlProblem one{PointwiseRegion{1.0}, T, y, 1, 0.0, 1e-6};
  const HumSolution sol = solve_hum(one);
  const Eigen::VectorXd r = pairing_vector(y);
  CHECK(to_vector(sol.adjoint0)(0) == Approx(r(0) / (M_PI / temporal_frequency(0))).epsilon(1e-12).scale(1.0));
  CHECK(to_vector(sol.adjoint0)(1) == Approx(r(1) / (M_PI / temporal_frequency(0))).epsilon(1e-12));
  CHECK(sol.diagnostics.solve_residual <= 1e-10);

  ModalState hidden = ModalState::zero(2);
  hidden.a[1] = 1.0;
  const ControlProblem bad{PointwiseRegion{2.0 / 3.0}, 2.0, hidden, 2, 0.0, 1e-6};
  CHECK_THROWS_AS(solve_hum(bad), NonInvertibleGramian);
  try {
    solve_hum(bad);
  } catch (const NonInvertibleGramian& e) {
    CHECK(e.mode() == 1);
  }
}

TEST_CASE("synthesized controls") {
  CHECK(synthesize_control(ModalState::zero(3), PointwiseRegion{0.4}, 2.0).point_signal()
            .simplified()
            .empty());
  ModalState p = ModalState::zero(1);
  p.a[0] = 1.0;
  const TrigSeries v = synthesize_control(p, PointwiseRegion{1.0}, 2.0).point_signal();
  for (double t : {0.0, 0.4, 1.7}) {
    CHECK(v(t) == Approx(std::cos(temporal_frequency(0) * t)).epsilon(1e-14).scale(1.0));
  }
  const ControlField g = synthesize_control(p, InternalRegion{0.25, 4}, 2.0);
  for (double x : {0.26, 0.3, 0.49}) {
    for (double t : {0.0, 0.8}) {
      CHECK(g.field_value(x, t) ==
            Approx(4 * std::cos(temporal_frequency(0) * t) * std::sin(spatial_frequency(0) * x))
                .epsilon(1e-13)
                .scale(1.0));
    }
  }
  for (double x : {0.0, 0.1, 0.2499, 0.5001, 0.9}) CHECK(g.field_value(x, 0.3) == 0.0);
}

TEST_CASE("headline null control") {
  const int M = 16;
  for (const ControlRegion& region :
       {ControlRegion{InternalRegion{1.0 / 3.0, 8}}, ControlRegion{PointwiseRegion{1.0 / 3.0}}}) {
    const ControlProblem problem{region, 2.0, smooth_decay(M), M, 1e-10, 1e-6};
    const HumSolution sol = solve_hum(problem);
    const ControlField g = synthesize_control(sol.adjoint0, region, 2.0);
    const NullControlReport rep = verify_null_control(problem, g);
    CHECK(rep.relative_residual <= 1e-6);
    REQUIRE(rep.hum_identity_error);
    CHECK(*rep.hum_identity_error <= 1e-8);
    CHECK(rep.sign == 1);
    CHECK(sol.diagnostics.solve_residual <= 1e-10);
    CHECK(*hum_identity_check(problem.initial_data, sol.adjoint0, region, 2.0) <= 1e-8);
  }
  const ControlProblem zero{InternalRegion{0.2, 4}, 2.0, ModalState::zero(4), 4, 1e-10, 1e-6};
  const NullControlReport rep =
      verify_null_control(zero, synthesize_control(ModalState::zero(4), zero.region, 2.0));
  CHECK(rep.final_residual == 0.0);
  CHECK_FALSE(rep.hum_identity_error);
}

TEST_CASE("HUM functional is minimized by the solution") {
  std::mt19937_64 rng(43);
  const int M = 8;
  const ModalState y = random_state(M, rng, 2.0);
  const ControlProblem problem{InternalRegion{0.3, 6}, 2.0, y, M, 0.0, 1e-6};
  const HumSolution sol = solve_hum(problem);
  const Eigen::VectorXd r = pairing_vector(y);
  auto J = [&](const ModalState& p) {
    return 0.5 * sol.gramian.quadratic_form(p) - r.dot(to_vector(p));
  };
  const double best = J(sol.adjoint0);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int k = 0; k < 50; ++k) {
    ModalState q = sol.adjoint0;
    for (int m = 0; m < M; ++m) {
      q.a[m] += n(rng);
      q.beta[m] += n(rng);
    }
    CHECK(J(q) >= best);
  }
}

TEST_CASE("residual shrinks with the Tikhonov shift") {
  const int M = 16;
  const ModalState y = smooth_decay(M);
  double previous = INFINITY;
  for (double eps : {1e-4, 1e-6, 1e-8, 1e-10}) {
    const ControlProblem problem{InternalRegion{1.0 / 3.0, 8}, 2.0, y, M, eps, 1e-6};
    const HumSolution sol = solve_hum(problem);
    const double res =
        verify_null_control(problem, synthesize_control(sol.adjoint0, problem.region, 2.0))
            .relative_residual;
    CHECK(res <= 1.1 * previous);
    previous = res;
  }
}

TEST_CASE("HUM identity on random data") {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 10; ++k) {
    const ModalState y = random_state(10, rng, 2.0);
    const ControlRegion region = InternalRegion{0.2 + 0.05 * k, 5};
    const ControlProblem problem{region, 2.0, y, 10, 0.0, 1e-6};
    const HumSolution sol = solve_hum(problem);
    CHECK(*hum_identity_check(y, sol.adjoint0, region, 2.0) <= 1e-8);
  }
}

TEST_CASE("JSON round trip") {
  const Gramian g = assemble_gramian(InternalRegion{0.25, 4}, 2.0, 3);
  const Gramian back = gramian_from_json(gramian_to_json(g));
  CHECK(back.dim() == g.dim());
  CHECK((back.entries - g.entries).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::get<InternalRegion>(back.region).n == 4);
  CHECK(gramian_to_json(g)["schema"] == "beamctl/1");
  CHECK(std::holds_alternative<PointwiseRegion>(
      region_from_json(region_to_json(PointwiseRegion{0.3}))));
  CHECK_THROWS_AS(region_from_json(nlohmann::json{{"type", "strip"}}), InvalidArgument);
}
