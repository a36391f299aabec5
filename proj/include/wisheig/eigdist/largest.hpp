#pragma once

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "wisheig/combinatorics/pochhammer.hpp"
#include "wisheig/covariance.hpp"
#include "wisheig/eigdist/diagnostics.hpp"
#include "wisheig/hypergeom/series.hpp"

namespace wisheig {

namespace detail {

inline constexpr double kTruncationWarnRatio = 1e-6;

// DegreeSums behind a mutex so const evaluators can extend it lazily.
class SharedDegreeSums {
 public:
  SharedDegreeSums(HypergeomParams params, std::vector<double> x)
      : sums_(std::make_unique<DegreeSums>(std::move(params), std::move(x))) {}

  DegreeTerm at(int k) const {
    std::lock_guard lock(*mutex_);
    return sums_->at(k);
  }
  [[nodiscard]] bool scalar_path() const { return sums_->scalar_path(); }

 private:
  std::unique_ptr<DegreeSums> sums_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
};

// sign * exp(log_scale) * v without intermediate overflow.
inline double scaled(long double v, double log_scale) {
  if (v == 0.0L) return 0.0;
  const long double r = std::exp(std::log(std::fabs(v)) + static_cast<long double>(log_scale));
  return static_cast<double>(v < 0 ? -r : r);
}

inline void finish_diagnostics(Diagnostics& d, const SeriesResult& s, double value, double tail) {
  d.degree_used = s.degree_used;
  d.converged = s.converged;
  d.tail_estimate = tail;
  d.warnings = s.warnings;
  if (tail > kTruncationWarnRatio * std::fabs(value))
    d.warnings.push_back("truncation: tail estimate " + std::to_string(tail) + " exceeds 1e-6 of the value");
}

}  // namespace detail

/// Exact law of the largest eigenvalue l_1 of W ~ W_m(n, Sigma), m > n:
///   Pr(l_1 < x) = G (x/2)^{mn/2} etr(-x Sigma^{-1}/2) 1F1((m+1)/2; (n+m+1)/2; x Sigma^{-1}/2),
///   G = Gamma_n((n+1)/2) / (Gamma_n((n+m+1)/2) |Sigma|^{n/2}),
/// expanded as G' x^{mn/2} e^{-Tx} sum_k S_k x^k with T = tr(Sigma^{-1})/2 and
/// S_k the degree sums of the 1F1 at Sigma^{-1}/2. The S_k are shared by all x.
class LargestEigenvalueLaw {
 public:
  LargestEigenvalueLaw(int n, const CovarianceSpec& cov, TruncationPolicy trunc = {})
      : n_(n), m_(cov.m()), trunc_(trunc),
        sums_({{0.5 * (cov.m() + 1)}, {0.5 * (n + cov.m() + 1)}}, cov.inverse_scaled(0.5)) {
    if (!(n >= 1 && m_ > n)) throw domain_error("largest eigenvalue law: need m > n >= 1");
    trunc_.validate();
    p_ = 0.5 * m_ * n_;
    t_ = 0.5 * cov.trace_inverse();
    log_const_ = log_multivariate_gamma(n_, 0.5 * (n_ + 1)) - log_multivariate_gamma(n_, 0.5 * (n_ + m_ + 1)) -
                 0.5 * n_ * cov.log_det() - p_ * std::numbers::ln2;
  }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] const TruncationPolicy& truncation() const noexcept { return trunc_; }

  [[nodiscard]] Evaluation cdf(double x) const {
    check(x);
    Evaluation out;
    if (x == 0.0) return out;
    const long double lx = std::log(static_cast<long double>(x));
    detail::SeriesAccumulator acc(trunc_);
    for (int k = 0;; ++k) {
      const auto s = sums_.at(k);
      const long double xk = std::exp(k * lx);
      if (!acc.add({s.sum * xk, s.abs_sum * xk})) break;
    }
    const double log_pref = log_const_ + p_ * std::log(x) - t_ * x;
    const SeriesResult series = acc.finish();
    const double raw = detail::scaled(acc.total(), log_pref);
    out.value = std::clamp(raw, 0.0, 1.0);
    out.diagnostics.clamp_amount = std::fabs(raw - out.value);
    detail::finish_diagnostics(out.diagnostics, series, out.value,
                               trunc_.report_tail ? detail::scaled(acc.last_abs(), log_pref) : 0.0);
    return out;
  }

  /// Term-by-term derivative: G' e^{-Tx} sum_k S_k {(p+k) x^{p+k-1} - T x^{p+k}}, p = mn/2.
  [[nodiscard]] Evaluation pdf(double x) const {
    check(x);
    Evaluation out;
    if (x == 0.0) {
      out.value = p_ > 1.0 ? 0.0 : std::exp(log_const_) * p_;
      return out;
    }
    const long double lx = std::log(static_cast<long double>(x));
    detail::SeriesAccumulator acc(trunc_);
    for (int k = 0;; ++k) {
      const auto s = sums_.at(k);
      const long double w = std::exp(k * lx) * (p_ + k - t_ * static_cast<long double>(x));
      if (!acc.add({s.sum * w, s.abs_sum * std::fabs(w)})) break;
    }
    const double log_pref = log_const_ + (p_ - 1.0) * std::log(x) - t_ * x;
    const SeriesResult series = acc.finish();
    const double raw = detail::scaled(acc.total(), log_pref);
    out.value = std::max(raw, 0.0);
    out.diagnostics.clamp_amount = std::fabs(raw - out.value);
    detail::finish_diagnostics(out.diagnostics, series, out.value,
                               trunc_.report_tail ? detail::scaled(acc.last_abs(), log_pref) : 0.0);
    return out;
  }

 private:
  static void check(double x) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw domain_error("largest eigenvalue law: x must be finite and >= 0");
  }

  int n_, m_;
  TruncationPolicy trunc_;
  detail::SharedDegreeSums sums_;
  double p_ = 0.0, t_ = 0.0, log_const_ = 0.0;
};

inline Evaluation largest_eig_cdf_exact(double x, int n, const CovarianceSpec& cov, const TruncationPolicy& trunc = {}) {
  return LargestEigenvalueLaw(n, cov, trunc).cdf(x);
}

inline Evaluation largest_eig_pdf_exact(double x, int n, const CovarianceSpec& cov, const TruncationPolicy& trunc = {}) {
  return LargestEigenvalueLaw(n, cov, trunc).pdf(x);
}

}  // namespace wisheig
