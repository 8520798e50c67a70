#include "bagbound/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bagbound {

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation (relative error ~1.15e-9), then refined.
double acklam(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) return 0.0;
  // Work in the lower tail so the residual is computed without cancellation,
  // then reflect.
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;
  double x = acklam(tail);
  for (int i = 0; i < 2; ++i) {
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - tail;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);  // Halley step
  }
  // `tail` is exact when p <= 0.5; for p > 0.5 the subtraction 1 - p is exact
  // in binary floating point for p in [0.5, 1).
  return upper ? -x : x;
}

namespace {

// Modified Lentz evaluation of the incomplete-beta continued fraction.
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::domain_error("incomplete_beta: a, b must be > 0");
  if (x < 0.0 || x > 1.0) throw std::domain_error("incomplete_beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double x, double df) {
  if (!(df > 0.0)) throw std::domain_error("student_t_cdf: df must be > 0");
  if (x == 0.0) return 0.5;
  const double x2 = x * x;
  // Lower-tail mass beyond |x|, taking whichever beta argument is small.
  double tail;
  if (x2 < df) {
    tail = 0.5 * (1.0 - incomplete_beta(0.5, 0.5 * df, x2 / (df + x2)));
  } else {
    tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x2));
  }
  return x > 0.0 ? 1.0 - tail : tail;
}

namespace {

double student_t_pdf(double x, double df) {
  const double log_c = std::lgamma(0.5 * (df + 1.0)) - std::lgamma(0.5 * df) -
                       0.5 * std::log(df * std::numbers::pi);
  return std::exp(log_c - 0.5 * (df + 1.0) * std::log1p(x * x / df));
}

// Upper-tail probability P(T > x) for x >= 0, computed directly.
double student_t_sf(double x, double df) {
  const double x2 = x * x;
  if (x2 < df) return 0.5 * (1.0 - incomplete_beta(0.5, 0.5 * df, x2 / (df + x2)));
  return 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + x2));
}

}  // namespace

double t_quantile(double p, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("t_quantile: p must lie in (0, 1)");
  if (!(df >= 1.0) || !std::isfinite(df)) {
    throw std::domain_error("t_quantile: df must be >= 1");
  }
  if (p == 0.5) return 0.0;
  const bool upper = p > 0.5;
  const double tail = upper ? 1.0 - p : p;  // target for P(T > x), x > 0
  double x;
  if (df == 1.0) {
    x = std::tan(std::numbers::pi * (0.5 - tail));
  } else if (df == 2.0) {
    const double q = 1.0 - 2.0 * tail;
    x = q / std::sqrt(2.0 * tail * (1.0 - tail));
  } else {
    // Safeguarded Newton on the upper tail, bracketed in [lo, hi].
    double lo = 0.0;
    double hi = std::max(1.0, -normal_quantile(tail));
    while (student_t_sf(hi, df) > tail) {
      lo = hi;
      hi *= 2.0;
    }
    x = std::clamp(-normal_quantile(tail), lo, hi);
    for (int it = 0; it < 200; ++it) {
      const double f = student_t_sf(x, df) - tail;  // decreasing in x
      if (f > 0.0) lo = x; else hi = x;
      const double step = f / student_t_pdf(x, df);
      double next = x + step;
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - x) <= 1e-13 * std::max(1.0, std::abs(x))) {
        x = next;
        break;
      }
      x = next;
    }
  }
  return upper ? x : -x;
}

}  // namespace bagbound
