#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "wisheig/error.hpp"

namespace wisheig {

namespace detail {

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTiny = 1e-300;

// P(a, x) by its power series; use for x < a + 1.
inline double gamma_p_series(double a, double x) {
  double term = 1.0 / a, sum = term;
  for (int n = 1; n < 100000; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps) break;
  }
  return sum * std::exp(a * std::log(x) - x - std::lgamma(a));
}

// Q(a, x) by the Legendre continued fraction (modified Lentz); x >= a + 1.
inline double gamma_q_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return std::exp(a * std::log(x) - x - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b), valid for x < (a + 1) / (a + b + 2).
inline double beta_fraction(double a, double b, double x) {
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 100000; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

// Abramowitz & Stegun 26.2.23, |error| < 4.5e-4; only used as a starting point.
inline double normal_quantile_approx(double p) {
  const double q = std::min(p, 1.0 - p);
  const double t = std::sqrt(-2.0 * std::log(q));
  const double z = t - (2.515517 + 0.802853 * t + 0.010328 * t * t) /
                           (1.0 + 1.432788 * t + 0.189269 * t * t + 0.001308 * t * t * t);
  return p < 0.5 ? -z : z;
}

inline double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Solves cdf(x) = p on [0, inf) by Newton steps kept inside a bracket,
// bisecting whenever Newton would leave it.
inline double invert_cdf(const std::function<double(double)>& cdf, const std::function<double(double)>& pdf,
                         double p, double guess) {
  double lo = 0.0, hi = std::max(guess, 1e-8);
  while (cdf(hi) < p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw domain_error("quantile: failed to bracket");
  }
  double x = std::clamp(guess, lo, hi);
  if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    const double f = cdf(x) - p;
    if (f == 0.0) return x;
    (f < 0 ? lo : hi) = x;
    const double dens = pdf(x);
    double next = (dens > 0 && std::isfinite(dens)) ? x - f / dens : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 2 * kEps * std::fabs(x) || hi - lo <= 2 * kEps * hi) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

/// Regularised lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
  if (!(a > 0.0)) throw domain_error("gamma_p: shape must be positive");
  if (!(x >= 0.0)) throw domain_error("gamma_p: x must be non-negative");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? detail::gamma_p_series(a, x) : 1.0 - detail::gamma_q_fraction(a, x);
}

/// Regularised upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw domain_error("gamma_q: shape must be positive");
  if (!(x >= 0.0)) throw domain_error("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - detail::gamma_p_series(a, x) : detail::gamma_q_fraction(a, x);
}

/// Regularised incomplete beta I_x(a, b).
inline double beta_inc(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw domain_error("beta_inc: parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("beta_inc: x must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  if (a == b && x == 0.5) return 0.5;  // exact by symmetry; the fraction would leave ~1e-15
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_fraction(b, a, 1.0 - x) / b;
}

struct ChiSquare {
  double dof;
  explicit ChiSquare(double d) : dof(d) {
    if (!(d > 0.0) || !std::isfinite(d)) throw domain_error("ChiSquare: dof must be positive");
  }
};

struct FDist {
  double dof1, dof2;
  FDist(double d1, double d2) : dof1(d1), dof2(d2) {
    if (!(d1 > 0.0 && d2 > 0.0) || !std::isfinite(d1) || !std::isfinite(d2))
      throw domain_error("FDist: dof must be positive");
  }
};

inline double gamma_pdf(double x, double shape, double scale) {
  if (!(shape > 0.0 && scale > 0.0)) throw domain_error("gamma_pdf: shape and scale must be positive");
  if (!(x >= 0.0)) throw domain_error("gamma_pdf: x must be non-negative");
  if (x == 0.0) return shape < 1.0 ? INFINITY : (shape == 1.0 ? 1.0 / scale : 0.0);
  const double z = x / scale;
  return std::exp((shape - 1.0) * std::log(z) - z - std::lgamma(shape)) / scale;
}

inline double gamma_cdf(double x, double shape, double scale) {
  if (!(scale > 0.0)) throw domain_error("gamma_cdf: scale must be positive");
  return gamma_p(shape, x / scale);
}

inline double chisq_pdf(double x, ChiSquare d) { return gamma_pdf(x, 0.5 * d.dof, 2.0); }
inline double chisq_cdf(double x, ChiSquare d) { return gamma_p(0.5 * d.dof, 0.5 * x); }
inline double chisq_sf(double x, ChiSquare d) { return gamma_q(0.5 * d.dof, 0.5 * x); }

inline double chisq_quantile(double p, ChiSquare d) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("chisq_quantile: p must lie in (0, 1)");
  // Wilson-Hilferty start.
  const double k = d.dof;
  const double z = detail::normal_quantile_approx(p);
  const double h = 2.0 / (9.0 * k);
  double guess = k * std::pow(std::max(1.0 - h + z * std::sqrt(h), 0.01), 3.0);
  return detail::invert_cdf([&](double x) { return chisq_cdf(x, d); }, [&](double x) { return chisq_pdf(x, d); }, p,
                            guess);
}

inline double f_pdf(double x, FDist d) {
  if (!(x >= 0.0)) throw domain_error("f_pdf: x must be non-negative");
  const double a = 0.5 * d.dof1, b = 0.5 * d.dof2;
  if (x == 0.0) return a < 1.0 ? INFINITY : (a == 1.0 ? 1.0 : 0.0);
  const double r = d.dof1 / d.dof2;
  return std::exp(a * std::log(r) + (a - 1.0) * std::log(x) - (a + b) * std::log1p(r * x) - detail::log_beta(a, b));
}

inline double f_cdf(double x, FDist d) {
  if (!(x >= 0.0)) throw domain_error("f_cdf: x must be non-negative");
  if (std::isinf(x)) return 1.0;
  const double t = d.dof1 * x;
  return beta_inc(0.5 * d.dof1, 0.5 * d.dof2, t / (t + d.dof2));
}

inline double f_quantile(double p, FDist d) {
  if (!(p > 0.0 && p < 1.0)) throw domain_error("f_quantile: p must lie in (0, 1)");
  return detail::invert_cdf([&](double x) { return f_cdf(x, d); }, [&](double x) { return f_pdf(x, d); }, p, 1.0);
}

}  // namespace wisheig
