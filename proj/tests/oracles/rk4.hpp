#pragma once

// Classic RK4 on each modal oscillator y'' + w^2 y = g(t), one mode at a
// time. Knows nothing about the closed forms it is used to check.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

struct ModalEndState {
  std::vector<double> a;     // y_m(T)
  std::vector<double> beta;  // y_m'(T) / w_m
};

/// Integrates each mode m < M from (a_m, w_m beta_m) with forcing(m, t).
inline ModalEndState rk4_modal(const std::vector<double>& a0,
                               const std::vector<double>& beta0,
                               const std::function<double(int, double)>& forcing,
                               double T, double dt = 1e-5) {
  const int M = static_cast<int>(a0.size());
  const long steps = std::lround(T / dt);
  const double h = T / steps;
  ModalEndState out;
  out.a.resize(M);
  out.beta.resize(M);
  for (int m = 0; m < M; ++m) {
    const double mu = (2 * m + 1) * M_PI / 2;
    const double w = mu * mu;
    const double w2 = w * w;
    double y = a0[m];
    double v = w * beta0[m];
    for (long k = 0; k < steps; ++k) {
      const double t = k * h;
      const double g0 = forcing(m, t);
      const double gh = forcing(m, t + 0.5 * h);
      const double g1 = forcing(m, t + h);
      const double k1y = v, k1v = g0 - w2 * y;
      const double k2y = v + 0.5 * h * k1v, k2v = gh - w2 * (y + 0.5 * h * k1y);
      const double k3y = v + 0.5 * h * k2v, k3v = gh - w2 * (y + 0.5 * h * k2y);
      const double k4y = v + h * k3v, k4v = g1 - w2 * (y + h * k3y);
      y += h / 6.0 * (k1y + 2 * k2y + 2 * k3y + k4y);
      v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    out.a[m] = y;
    out.beta[m] = v / w;
  }
  return out;
}

}  // namespace oracle
