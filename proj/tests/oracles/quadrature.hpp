#pragma once

// Reference integrators for checking closed forms. Deliberately naive and
// independent of the library.

#include <array>
#include <cmath>
#include <functional>

namespace oracle {

using Fn = std::function<double(double)>;

namespace detail {

inline double simpson_step(const Fn& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Gauss-Kronrod 7-15 nodes on [-1, 1] (positive half, centre last).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double gk15(const Fn& f, double a, double b, double& error, double& resabs) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  resabs = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    kronrod += kWgk[j] * (f1 + f2);
    resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  error = std::abs((kronrod - gauss) * h);
  resabs *= std::abs(h);
  return kronrod * h;
}

inline double gk_step(const Fn& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  double resabs = 0.0;
  const double whole = gk15(f, a, b, err, resabs);
  // below rounding level further bisection cannot help
  if (depth <= 0 || err <= tol || err <= 50.0 * 2.2e-16 * resabs) return whole;
  const double m = 0.5 * (a + b);
  return gk_step(f, a, m, 0.5 * tol, depth - 1) + gk_step(f, m, b, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson with Richardson correction; absolute tolerance.
inline double simpson(const Fn& f, double a, double b, double tol = 1e-12,
                      int max_depth = 50) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Adaptive Gauss-Kronrod 7-15 on `panels` equal pieces; absolute tolerance.
inline double gauss_kronrod(const Fn& f, double a, double b, double tol = 1e-13,
                            int panels = 1, int max_depth = 30) {
  if (a == b) return 0.0;
  double sum = 0.0;
  const double h = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    sum += detail::gk_step(f, a + k * h, a + (k + 1) * h, tol / panels, max_depth);
  }
  return sum;
}

/// Iterated Gauss-Kronrod over [ax, bx] x [ay, by].
inline double gauss_kronrod_2d(const std::function<double(double, double)>& f,
                               double ax, double bx, double ay, double by,
                               double tol = 1e-12, int panels_x = 1, int panels_y = 1) {
  return gauss_kronrod(
      [&](double x) {
        return gauss_kronrod([&](double y) { return f(x, y); }, ay, by, tol, panels_y);
      },
      ax, bx, tol, panels_x);
}

}  // namespace oracle
