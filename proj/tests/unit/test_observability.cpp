#include <cmath>
#include <numeric>
#include <random>

#include "beamctl/beam_dynamics.hpp"
#include "beamctl/errors.hpp"
#include "beamctl/kernels.hpp"
#include "beamctl/modal_space.hpp"
#include "beamctl/observability.hpp"
#include "doctest.h"
#include "oracles/quadrature.hpp"

using namespace beamctl;
using doctest::Approx;

TEST_CASE("window mass examples") {
  const double ref =
      oracle::simpson([](double x) { return std::pow(std::sin(M_PI * x / 2), 2); }, 0.25, 0.5, 1e-14);
  CHECK(window_mass(0, 0.25, 4) == Approx(ref).epsilon(1e-12));

  // a full period 2/(2m+1) of sin^2(mu_m x) carries exactly half its width;
  // no integer n has such a window, so the interval is given directly
  const double period = 2.0 / 3.0;
  CHECK(window_overlap(1, 1, 0.1, 0.1 + period) == Approx(period / 2).epsilon(1e-14));
  CHECK(window_overlap(1, 1, 0.1, 0.1 + 2 * period / 2) == Approx(1.0 / 3.0).epsilon(1e-14));

  const double far = window_mass(200, 0.37, 10);
  CHECK(std::abs(far - 0.05) <= 2.0 / (2 * spatial_frequency(200) * 10));
  const double far_ref = oracle::gauss_kronrod(
      [&](double x) { return std::pow(std::sin(spatial_frequency(200) * x), 2); }, 0.37, 0.47,
      1e-14, 64);
  CHECK(far == Approx(far_ref).epsilon(1e-10));
}

TEST_CASE("window mass lower bound") {
  CHECK(window_mass_lower_bound(4) == Approx(0.125 - std::sin(M_PI / 8) / M_PI).epsilon(1e-15));
  CHECK(window_mass_lower_bound(4) == Approx(0.0031894).epsilon(1e-4));
  CHECK(window_mass_lower_bound(1) == Approx(0.5 - 1 / M_PI).epsilon(1e-15));
  CHECK(window_mass_lower_bound(1000) == Approx(M_PI * M_PI / 48e9).epsilon(1e-3));
  for (int n = 1; n < 200; ++n) CHECK(window_mass_lower_bound(n) > 0.0);
}

TEST_CASE("window mass stays in [0, 1/n] and rescales to the overlap kernel") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> mode(0, 500);
  std::uniform_int_distribution<int> ns(1, 100);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 2000; ++k) {
    const int n = ns(rng);
    const int m = mode(rng);
    const double xi = u(rng) * (1.0 - 1.0 / n);
    const double w = window_mass(m, xi, n);
    CHECK(w >= 0.0);
    CHECK(w <= 1.0 / n + 1e-16);
    const double b = (2.0 * m + 1.0) * xi / 2.0;
    const double t = (2.0 * m + 1.0) / (2.0 * n);
    CHECK(n * w == Approx(overlap_kernel(b, t)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("window mass diagnostics record the bound instead of trusting it") {
  const WindowMassDiagnostics d = window_mass_diagnostics(1.0 / 3.0, 8, 300);
  CHECK(d.rows.size() == 300);
  double lowest = 1.0;
  int count = 0;
  for (const WindowMassRow& r : d.rows) {
    lowest = std::min(lowest, r.mass);
    count += r.bound_violated;
    CHECK(r.bound_violated == (r.mass < r.lower_bound));
  }
  CHECK(d.infimum == lowest);
  CHECK(d.violations == count);
}

TEST_CASE("overlap kernel") {
  CHECK(overlap_kernel(0.3, 0.0) == Approx(std::pow(std::sin(0.3 * M_PI), 2)).epsilon(1e-15));
  CHECK(overlap_kernel(0.3, 0.0) == Approx(0.654508).epsilon(1e-6));
  CHECK(overlap_kernel(0.5, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(overlap_kernel(0.25, 0.5) == Approx(0.5 * (1 + 2 / M_PI)).epsilon(1e-15));
  CHECK(overlap_kernel(0.25, 0.5) == Approx(0.81831).epsilon(1e-5));

  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const double b = u(rng);
    const double t = k % 10 == 0 ? 1e-10 * u(rng) : 4 * u(rng);
    const double v = overlap_kernel(b, t);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(v == Approx(overlap_kernel(b + 1.0, t)).epsilon(1e-12).scale(1.0));
    const double ref = oracle::gauss_kronrod(
        [&](double z) { return std::pow(std::sin(M_PI * (b + t * z)), 2); }, 0, 1, 1e-14, 16);
    CHECK(v == Approx(ref).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("inverse bound") {
  for (double t : {0.0, 0.3, 5.0}) CHECK(inverse_bound_check(0.0, t).ok);
  const InverseBoundResult r = inverse_bound_check(0.5, 0.75);
  CHECK(r.lhs == Approx(0.5 * (1 - std::sin(0.75 * M_PI) / (0.75 * M_PI) * std::cos(2 * M_PI * 0.875)))
                     .epsilon(1e-14));
  CHECK(r.ok);
  CHECK(kInverseBoundConstant == Approx(0.5 * (1 - 2 / M_PI)));
  CHECK(kInverseBoundConstant < 1.0 / 3.0);
  CHECK(kInverseBoundConstant < 7.0 / 24.0);

  const auto tally = kernels::inverse_bound_sweep(kernels::open_unit_grid(0.01),
                                                  kernels::positive_grid(0.01, 10.0));
  CHECK(tally.points == 99 * 1000);
  CHECK(tally.violations == 0);
  CHECK(tally.min_slack >= -1e-12);
}

TEST_CASE("strategic check") {
  const StrategicReport two_thirds = strategic_check(2, 3);
  CHECK_FALSE(two_thirds.strategic);
  REQUIRE(two_thirds.witness_m);
  CHECK(*two_thirds.witness_m == 1);
  CHECK(std::abs(std::sin(spatial_frequency(1) * 2.0 / 3.0)) < 1e-12);
  CHECK((2 * *two_thirds.witness_m + 1) * 2 % (2 * 3) == 0);

  const StrategicReport half = strategic_check(1, 2);
  CHECK(half.strategic);
  CHECK(*half.lower_bound == Approx(std::sqrt(0.5)).epsilon(1e-15));
  CHECK(*strategic_check(1, 3).lower_bound == Approx(0.5).epsilon(1e-15));

  for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {1, 5}, {3, 7}, {5, 12}}) {
    const StrategicReport r = strategic_check(p, q);
    REQUIRE(r.strategic);
    double direct = 1.0;
    for (int m = 0; m <= 10000; ++m) {
      direct = std::min(direct, std::abs(std::sin(spatial_frequency(m) * p / q)));
    }
    CHECK(direct >= *r.lower_bound - 1e-10);
    CHECK(direct == Approx(*r.lower_bound).epsilon(1e-9));
  }
  CHECK_THROWS_AS(strategic_check(2, 4), InvalidArgument);
  CHECK_THROWS_AS(strategic_check(0, 3), InvalidArgument);
  CHECK_THROWS_AS(strategic_check(3, 3), InvalidArgument);
  // in lowest terms: strategic iff p is odd; for even p, m = (q - 1)/2 works
  for (int q = 2; q < 40; ++q) {
    for (int p = 1; p < q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const StrategicReport r = strategic_check(p, q);
      CHECK(r.strategic == (p % 2 == 1));
      if (!r.strategic) CHECK(*r.witness_m == (q - 1) / 2);
    }
  }
}

TEST_CASE("observability constant") {
  const double T = 2 * M_PI / temporal_frequency(0);
  CHECK(observability_constant(PointwiseRegion{1.0}, T, 1) ==
        Approx(M_PI / temporal_frequency(0)).epsilon(1e-12));
  CHECK(observability_constant(PointwiseRegion{1.0}, T, 1) == Approx(1.2732).epsilon(1e-4));
  CHECK_THROWS_AS(observability_constant(InternalRegion{0.9, 4}, 2.0, 4), InvalidRegion);

  const double c8 = observability_constant(InternalRegion{1.0 / 3.0, 4}, 2.0, 8);
  const double c16 = observability_constant(InternalRegion{1.0 / 3.0, 4}, 2.0, 16);
  CHECK(c8 > 0.0);
  CHECK(c16 <= c8 * (1 + 1e-12));
  for (int M : {2, 4, 8, 16}) {
    CHECK(observability_constant(PointwiseRegion{1.0 / 3.0}, 2.0, M) > 0.0);
    CHECK(std::abs(observability_constant(PointwiseRegion{2.0 / 3.0}, 2.0, M)) < 1e-12);
  }
  CHECK(invisible_modes(2.0 / 3.0, 16) == std::vector<int>{1, 4, 7, 10, 13});
  CHECK(invisible_modes(1.0 / 3.0, 16).empty());
}
