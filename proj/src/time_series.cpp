#include "beamctl/time_series.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace beamctl {
namespace {

constexpr double kSeriesCutoff = 2.0;

double series_cos_moment(int k, double x, double T) {
  const double z = x * T;
  const double z2 = z * z;
  double term = 1.0;  // (-1)^j z^(2j) / (2j)!
  double sum = term / (k + 1);
  for (int j = 1; j < 40; ++j) {
    term *= -z2 / ((2.0 * j - 1.0) * (2.0 * j));
    const double contrib = term / (2.0 * j + k + 1.0);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(T, k + 1) * sum;
}

double series_sin_moment(int k, double x, double T) {
  const double z = x * T;
  const double z2 = z * z;
  double term = z;  // (-1)^j z^(2j+1) / (2j+1)!
  double sum = term / (k + 2);
  for (int j = 1; j < 40; ++j) {
    term *= -z2 / ((2.0 * j) * (2.0 * j + 1.0));
    const double contrib = term / (2.0 * j + k + 2.0);
    sum += contrib;
    if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(T, k + 1) * sum;
}

// Both moments for x > 0 with |x| T >= cutoff, by integration by parts.
void recursive_moments(int k, double x, double T, double* c, double* s) {
  const double sx = std::sin(x * T);
  const double cx = std::cos(x * T);
  const double half = std::sin(0.5 * x * T);
  double ck = sx / x;
  double sk = 2.0 * half * half / x;
  double tk = 1.0;
  for (int j = 1; j <= k; ++j) {
    tk *= T;
    const double c_next = tk * sx / x - j * sk / x;
    const double s_next = -tk * cx / x + j * ck / x;
    ck = c_next;
    sk = s_next;
  }
  *c = ck;
  *s = sk;
}

}  // namespace

double cos_moment(int k, double x, double T) {
  x = std::abs(x);
  if (x * T < kSeriesCutoff) return series_cos_moment(k, x, T);
  double c = 0.0;
  double s = 0.0;
  recursive_moments(k, x, T, &c, &s);
  return c;
}

double sin_moment(int k, double x, double T) {
  if (x < 0.0) return -sin_moment(k, -x, T);
  if (x * T < kSeriesCutoff) return series_sin_moment(k, x, T);
  double c = 0.0;
  double s = 0.0;
  recursive_moments(k, x, T, &c, &s);
  return s;
}

void TrigSeries::add(double coef, double freq, Phase phase, int power) {
  terms_.push_back({coef, freq, power, phase});
}

void TrigSeries::append(const TrigSeries& other, double scale) {
  for (const TrigTerm& t : other.terms_) {
    terms_.push_back({scale * t.coef, t.freq, t.power, t.phase});
  }
}

double TrigSeries::operator()(double t) const {
  double sum = 0.0;
  for (const TrigTerm& term : terms_) {
    const double arg = term.freq * t;
    double v = term.phase == Phase::Cos ? std::cos(arg) : std::sin(arg);
    for (int k = 0; k < term.power; ++k) v *= t;
    sum += term.coef * v;
  }
  return sum;
}

TrigSeries TrigSeries::scaled(double s) const {
  TrigSeries out;
  out.append(*this, s);
  return out;
}

TrigSeries TrigSeries::derivative() const {
  TrigSeries out;
  for (const TrigTerm& t : terms_) {
    if (t.power > 0) out.add(t.coef * t.power, t.freq, t.phase, t.power - 1);
    if (t.freq == 0.0) continue;
    if (t.phase == Phase::Cos) {
      out.add(-t.coef * t.freq, t.freq, Phase::Sin, t.power);
    } else {
      out.add(t.coef * t.freq, t.freq, Phase::Cos, t.power);
    }
  }
  return out;
}

TrigSeries TrigSeries::antiderivative() const {
  TrigSeries out;
  for (const TrigTerm& t : terms_) {
    if (t.power != 0) {
      throw std::logic_error("antiderivative: secular terms not supported");
    }
    if (t.phase == Phase::Cos) {
      if (t.freq == 0.0) {
        out.add(t.coef, 0.0, Phase::Cos, 1);
      } else {
        out.add(t.coef / t.freq, t.freq, Phase::Sin);
      }
    } else if (t.freq != 0.0) {
      out.add(t.coef / t.freq, 0.0, Phase::Cos);
      out.add(-t.coef / t.freq, t.freq, Phase::Cos);
    }
  }
  return out;
}

TrigSeries TrigSeries::simplified() const {
  using Key = std::tuple<double, int, int>;
  std::map<Key, std::size_t> index;
  std::vector<TrigTerm> merged;
  for (const TrigTerm& t : terms_) {
    if (t.phase == Phase::Sin && t.freq == 0.0) continue;
    const Key key{t.freq, t.power, static_cast<int>(t.phase)};
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, merged.size());
      merged.push_back(t);
    } else {
      merged[it->second].coef += t.coef;
    }
  }
  std::vector<TrigTerm> kept;
  for (const TrigTerm& t : merged) {
    if (t.coef != 0.0) kept.push_back(t);
  }
  return TrigSeries(std::move(kept));
}

double TrigSeries::integral(double T) const {
  double sum = 0.0;
  for (const TrigTerm& t : terms_) {
    sum += t.coef * (t.phase == Phase::Cos ? cos_moment(t.power, t.freq, T)
                                           : sin_moment(t.power, t.freq, T));
  }
  return sum;
}

TrigSeries operator+(const TrigSeries& lhs, const TrigSeries& rhs) {
  TrigSeries out = lhs;
  out.append(rhs);
  return out;
}

TrigSeries operator-(const TrigSeries& lhs, const TrigSeries& rhs) {
  TrigSeries out = lhs;
  out.append(rhs, -1.0);
  return out;
}

double integrate_product(const TrigSeries& lhs, const TrigSeries& rhs,
                         double T) {
  double sum = 0.0;
  for (const TrigTerm& p : lhs.terms()) {
    for (const TrigTerm& q : rhs.terms()) {
      const int k = p.power + q.power;
      const double diff = p.freq - q.freq;
      const double plus = p.freq + q.freq;
      double value = 0.0;
      if (p.phase == Phase::Cos && q.phase == Phase::Cos) {
        value = cos_moment(k, diff, T) + cos_moment(k, plus, T);
      } else if (p.phase == Phase::Sin && q.phase == Phase::Sin) {
        value = cos_moment(k, diff, T) - cos_moment(k, plus, T);
      } else if (p.phase == Phase::Sin) {
        value = sin_moment(k, plus, T) + sin_moment(k, diff, T);
      } else {
        value = sin_moment(k, plus, T) - sin_moment(k, diff, T);
      }
      sum += 0.5 * p.coef * q.coef * value;
    }
  }
  return sum;
}

}  // namespace beamctl
