#include "beamctl/modal_space.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "beamctl/errors.hpp"

namespace beamctl {
namespace {

constexpr int kGaussOrder = 10;

struct GaussRule {
  std::array<double, kGaussOrder> nodes{};
  std::array<double, kGaussOrder> weights{};
};

// Legendre roots by Newton iteration from the Chebyshev guess.
GaussRule make_gauss_rule() {
  GaussRule rule;
  const int n = kGaussOrder;
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& gauss_rule() {
  static const GaussRule rule = make_gauss_rule();
  return rule;
}

void check_same_size(const ModalState& lhs, const ModalState& rhs) {
  if (lhs.modes() != rhs.modes()) {
    throw InvalidArgument("modal states have different truncations");
  }
}

}  // namespace

FrequencyTable frequencies(int M) {
  if (M < 1) {
    throw InvalidArgument("frequencies: truncation M must be >= 1, got " +
                          std::to_string(M));
  }
  FrequencyTable table;
  table.mu.resize(M);
  table.omega.resize(M);
  for (int m = 0; m < M; ++m) {
    table.mu[m] = spatial_frequency(m);
    table.omega[m] = table.mu[m] * table.mu[m];
  }
  return table;
}

ModalState::ModalState(Eigen::VectorXd a_in, Eigen::VectorXd beta_in)
    : a(std::move(a_in)), beta(std::move(beta_in)) {
  if (a.size() != beta.size()) {
    throw InvalidArgument("ModalState: a and beta lengths differ");
  }
}

ModalState ModalState::zero(int M) {
  return ModalState(Eigen::VectorXd::Zero(M), Eigen::VectorXd::Zero(M));
}

bool ModalState::is_zero() const {
  return (a.array() == 0.0).all() && (beta.array() == 0.0).all();
}

ModalState operator+(const ModalState& lhs, const ModalState& rhs) {
  check_same_size(lhs, rhs);
  return ModalState(lhs.a + rhs.a, lhs.beta + rhs.beta);
}

ModalState operator-(const ModalState& lhs, const ModalState& rhs) {
  check_same_size(lhs, rhs);
  return ModalState(lhs.a - rhs.a, lhs.beta - rhs.beta);
}

ModalState operator*(double s, const ModalState& state) {
  return ModalState(s * state.a, s * state.beta);
}

double squared_norm(const ModalState& state, const SpaceTag& tag) {
  double sum = 0.0;
  for (int m = 0; m < state.modes(); ++m) {
    const double mu = spatial_frequency(m);
    const double mu4 = mu * mu * mu * mu;
    const double energy = state.a[m] * state.a[m] + state.beta[m] * state.beta[m];
    double weight = 1.0;
    switch (tag.space) {
      case Space::L2:
        break;
      case Space::V:
        weight = mu4;
        break;
      case Space::D4:
        weight = mu4 * mu4;
        break;
      case Space::Vdual:
        weight = 1.0 / mu4;
        break;
      case Space::F: {
        const double s = std::sin(mu * tag.xi);
        weight = s * s;
        break;
      }
      case Space::Fdual: {
        const double s = std::sin(mu * tag.xi);
        // sin(pi) is ~1e-16 in floating point; argument rounding grows with mu
        if (std::abs(s) <= 1e-12 * std::max(1.0, mu)) {
          throw DegenerateWeight("Fdual norm: sin(mu_m xi) = 0 at mode m = " +
                                     std::to_string(m),
                                 m);
        }
        weight = 1.0 / (s * s);
        break;
      }
    }
    sum += weight * energy;
  }
  return 0.5 * sum;
}

double squared_component_norm(std::span<const double> coeffs, Space space) {
  double sum = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    const double mu = spatial_frequency(static_cast<int>(m));
    const double mu4 = mu * mu * mu * mu;
    double weight = 1.0;
    switch (space) {
      case Space::L2:
        break;
      case Space::V:
        weight = mu4;
        break;
      case Space::D4:
        weight = mu4 * mu4;
        break;
      case Space::Vdual:
        weight = 1.0 / mu4;
        break;
      case Space::F:
      case Space::Fdual:
        throw InvalidArgument("F and Fdual are defined on data pairs only");
    }
    sum += weight * coeffs[m] * coeffs[m];
  }
  return 0.5 * sum;
}

std::vector<double> project(const std::function<double(double)>& f, int M,
                            int quadrature_points) {
  if (M < 1) throw InvalidArgument("project: M must be >= 1");
  if (quadrature_points < 2 * M + 2) {
    throw InvalidArgument("project: quadrature_points must be >= 2M+2");
  }
  const GaussRule& rule = gauss_rule();
  const int panels =
      std::max(2 * M - 1, (quadrature_points + kGaussOrder - 1) / kGaussOrder);
  const double h = 1.0 / panels;

  std::vector<double> coeffs(M, 0.0);
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int i = 0; i < kGaussOrder; ++i) {
      const double x = mid + 0.5 * h * rule.nodes[i];
      const double fw = f(x) * 0.5 * h * rule.weights[i];
      for (int m = 0; m < M; ++m) {
        coeffs[m] += fw * std::sin(spatial_frequency(m) * x);
      }
    }
  }
  for (double& c : coeffs) c *= 2.0;
  return coeffs;
}

ModalState smooth(const ModalState& state) {
  ModalState out = state;
  for (int m = 0; m < state.modes(); ++m) {
    const double mu = spatial_frequency(m);
    const double mu4 = mu * mu * mu * mu;
    out.a[m] /= mu4;
    out.beta[m] /= mu4;
  }
  return out;
}

ModalState unsmooth(const ModalState& state) {
  ModalState out = state;
  for (int m = 0; m < state.modes(); ++m) {
    const double mu = spatial_frequency(m);
    const double mu4 = mu * mu * mu * mu;
    out.a[m] *= mu4;
    out.beta[m] *= mu4;
  }
  return out;
}

double reconstruct(std::span<const double> coeffs, double x) {
  double sum = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    sum += coeffs[m] * std::sin(spatial_frequency(static_cast<int>(m)) * x);
  }
  return sum;
}

double reconstruct_dx(std::span<const double> coeffs, double x) {
  double sum = 0.0;
  for (std::size_t m = 0; m < coeffs.size(); ++m) {
    const double mu = spatial_frequency(static_cast<int>(m));
    sum += coeffs[m] * mu * std::cos(mu * x);
  }
  return sum;
}

double displacement_inner(const ModalState& lhs, const ModalState& rhs) {
  check_same_size(lhs, rhs);
  return 0.5 * lhs.a.dot(rhs.a);
}

double velocity_inner(const ModalState& lhs, const ModalState& rhs) {
  check_same_size(lhs, rhs);
  double sum = 0.0;
  for (int m = 0; m < lhs.modes(); ++m) {
    const double w = temporal_frequency(m);
    sum += (w * lhs.beta[m]) * (w * rhs.beta[m]);
  }
  return 0.5 * sum;
}

double duality_pairing(const ModalState& y, const ModalState& phi) {
  check_same_size(y, phi);
  double sum = 0.0;
  for (int m = 0; m < y.modes(); ++m) {
    const double w = temporal_frequency(m);
    sum += w * (y.a[m] * phi.beta[m] - y.beta[m] * phi.a[m]);
  }
  return 0.5 * sum;
}

}  // namespace beamctl
