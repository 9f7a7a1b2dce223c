#pragma once

// Finite sums of t^k cos(w t) and t^k sin(w t) on [0, T], with exact
// integrals. Modal time signals of free and forced beam solutions are of
// this form (k = 1 appears only for resonant forcing).

#include <vector>

namespace beamctl {

enum class Phase { Cos, Sin };

struct TrigTerm {
  double coef = 0.0;
  double freq = 0.0;
  int power = 0;
  Phase phase = Phase::Cos;
};

/// int_0^T t^k cos(x t) dt. Uses the Taylor series for |x| T < 2.
double cos_moment(int k, double x, double T);
/// int_0^T t^k sin(x t) dt.
double sin_moment(int k, double x, double T);

class TrigSeries {
 public:
  TrigSeries() = default;
  explicit TrigSeries(std::vector<TrigTerm> terms) : terms_(std::move(terms)) {}

  void add(double coef, double freq, Phase phase, int power = 0);
  void append(const TrigSeries& other, double scale = 1.0);

  const std::vector<TrigTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double operator()(double t) const;
  TrigSeries scaled(double s) const;
  TrigSeries derivative() const;
  /// t -> int_0^t s(tau) dtau. Only defined for power-0 terms.
  TrigSeries antiderivative() const;
  /// Merges terms with equal (freq, power, phase); drops zeros.
  /// Term order follows first appearance.
  TrigSeries simplified() const;

  /// int_0^T s(t) dt.
  double integral(double T) const;

 private:
  std::vector<TrigTerm> terms_;
};

TrigSeries operator+(const TrigSeries& lhs, const TrigSeries& rhs);
TrigSeries operator-(const TrigSeries& lhs, const TrigSeries& rhs);

/// int_0^T lhs(t) rhs(t) dt, exact.
double integrate_product(const TrigSeries& lhs, const TrigSeries& rhs,
                         double T);

inline double l2_norm_squared(const TrigSeries& s, double T) {
  return integrate_product(s, s, T);
}

}  // namespace beamctl
