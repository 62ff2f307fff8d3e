#include "depthkit/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthkit/errors.hpp"

namespace depthkit::num {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw config_error("normal_quantile: p must lie in (0, 1)");
  }
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = normal_cdf(mid);
    if (std::abs(c - p) <= 1e-12) return mid;
    (c < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// Continued fraction for the incomplete beta (Numerical-Recipes style
// modified Lentz iteration).
double beta_cf(double a, double b, double x) {
  constexpr double eps = 1e-15;
  constexpr double fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw numeric_error("reg_inc_beta: continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) {
    throw config_error("reg_inc_beta: a, b must be positive");
  }
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_quantile_upper(double d1, double d2, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw config_error("f_quantile_upper: alpha must lie in (0, 1)");
  }
  if (!(d1 > 0.0 && d2 > 0.0)) {
    throw config_error("f_quantile_upper: degrees of freedom must be positive");
  }
  // P(F <= x) = I_z(d1/2, d2/2) with z = d1*x / (d1*x + d2); bisect on z.
  const double target = 1.0 - alpha;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = reg_inc_beta(d1 / 2.0, d2 / 2.0, mid);
    if (std::abs(c - target) <= 1e-10 && it > 40) {
      return d2 * mid / (d1 * (1.0 - mid));
    }
    (c < target ? lo : hi) = mid;
  }
  const double z = 0.5 * (lo + hi);
  if (z >= 1.0) throw numeric_error("f_quantile_upper: bracket collapsed at 1");
  return d2 * z / (d1 * (1.0 - z));
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

double median(std::vector<double> v) {
  if (v.empty()) throw config_error("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw config_error("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw config_error("quantile: q outside [0,1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

double mean(std::span<const double> v) {
  if (v.empty()) throw config_error("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) throw config_error("stddev needs at least two values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace depthkit::num
