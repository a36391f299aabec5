#pragma once

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "wisheig/eigdist/largest.hpp"

namespace wisheig {

/// Which exponent convention the ratio series uses.
///  - printed: v = tr(S1^{-1}) - q tr(S2^{-1}) and powers of q from
///    population 2, exactly as the closed form is usually quoted. v <= 0 is
///    a divergence.
///  - rederived: the r-integral done afresh for q = l1(pop 1) / l1(pop 2):
///    v = (tr(S2^{-1}) + q tr(S1^{-1}))/2, powers of q from population 1, and
///    the boundary term T1 T2 / v^2 that the term-by-term integration leaves
///    behind is removed.
enum class RatioVariant { printed, rederived };

inline constexpr RatioVariant kDefaultRatioVariant = RatioVariant::rederived;

inline const char* to_string(RatioVariant v) { return v == RatioVariant::printed ? "printed" : "rederived"; }

inline RatioVariant ratio_variant_from_string(const std::string& s) {
  if (s == "printed") return RatioVariant::printed;
  if (s == "rederived") return RatioVariant::rederived;
  throw domain_error("unknown ratio variant '" + s + "'");
}

/// Density of q = l_1^{(1)} / l_1^{(2)} for independent W^{(i)} ~ W_m(n_i, Sigma^{(i)}),
/// as the double series over (kappa, tau) truncated by total degree k + t.
class RatioDensity {
 public:
  RatioDensity(int n1, int n2, const CovarianceSpec& cov1, const CovarianceSpec& cov2, TruncationPolicy trunc = {},
               RatioVariant variant = kDefaultRatioVariant)
      : n1_(n1), n2_(n2), m_(cov1.m()), trunc_(trunc), variant_(variant),
        s1_({{0.5 * (cov1.m() + 1)}, {0.5 * (n1 + cov1.m() + 1)}}, cov1.inverse_scaled(0.5)),
        s2_({{0.5 * (cov2.m() + 1)}, {0.5 * (n2 + cov2.m() + 1)}}, cov2.inverse_scaled(0.5)) {
    if (cov2.m() != m_) throw domain_error("ratio density: populations differ in dimension");
    if (!(n1 >= 1 && n2 >= 1 && m_ > n1 && m_ > n2)) throw domain_error("ratio density: need m > n_i >= 1");
    trunc_.validate();
    p1_ = 0.5 * m_ * n1;
    p2_ = 0.5 * m_ * n2;
    t1_ = 0.5 * cov1.trace_inverse();
    t2_ = 0.5 * cov2.trace_inverse();
    log_c_ = log_multivariate_gamma(n1, 0.5 * (n1 + 1)) + log_multivariate_gamma(n2, 0.5 * (n2 + 1)) -
             (p1_ + p2_) * std::numbers::ln2 - log_multivariate_gamma(n1, 0.5 * (n1 + m_ + 1)) -
             log_multivariate_gamma(n2, 0.5 * (n2 + m_ + 1)) - 0.5 * n1 * cov1.log_det() -
             0.5 * n2 * cov2.log_det();
  }

  [[nodiscard]] RatioVariant variant() const noexcept { return variant_; }

  [[nodiscard]] Evaluation operator()(double q) const {
    if (!(q > 0.0) || !std::isfinite(q)) throw domain_error("ratio density: q must be positive and finite");

    // Orientation: population A supplies the r-power only, population B the
    // q-power; their degree sums are indexed by ia / ib.
    const bool printed = variant_ == RatioVariant::printed;
    const double ta = printed ? t1_ : t2_, tb = printed ? t2_ : t1_;
    const double pa = printed ? p1_ : p2_, pb = printed ? p2_ : p1_;
    const detail::SharedDegreeSums& sa = printed ? s1_ : s2_;
    const detail::SharedDegreeSums& sb = printed ? s2_ : s1_;
    const long double v = printed ? 2.0L * t1_ - 2.0L * q * t2_ : static_cast<long double>(ta) + q * tb;
    if (!(v > 0))
      throw divergence_error("ratio density (printed convention): v = tr(S1^-1) - q tr(S2^-1) <= 0 at q = " +
                             std::to_string(q) + "; the r-integral diverges");

    // Degree sums are pulled in as N grows: a[i] = S_A(i), bq[i] = S_B(i) q^i,
    // both well inside long double range for the degrees allowed.
    const long double lv = std::log(v), lq = std::log(static_cast<long double>(q));
    std::vector<long double> a_sums, bq_sums;
    long double qi = 1.0L;

    detail::SeriesAccumulator acc(trunc_);
    long double last_abs = 0.0L, prev_abs = 0.0L;
    for (int big_n = 0;; ++big_n) {
      a_sums.push_back(sa.at(big_n).sum);
      bq_sums.push_back(sb.at(big_n).sum * qi);
      qi *= q;
      const long double u = pa + pb + big_n;
      const long double head = std::exp(log_c_ + std::lgamma(u) - u * lv + (pb - 1) * lq);
      const long double r1 = u / v, r2 = u * (u + 1) / (v * v);
      detail::DegreeTerm d;
      for (int ib = 0; ib <= big_n; ++ib) {
        const int ia = big_n - ib;
        const long double a = pa + ia, b = pb + ib;
        const long double bracket = a * b - a * tb * q * r1 - b * ta * r1 + ta * tb * q * r2;
        const long double t = head * a_sums[static_cast<std::size_t>(ia)] * bq_sums[static_cast<std::size_t>(ib)] * bracket;
        d.sum += t;
      }
      // Terms inside one degree cancel heavily, so the stopping rule and the
      // tail estimate look at the net contribution D_N only.
      d.abs_sum = std::fabs(d.sum);
      prev_abs = last_abs;
      last_abs = d.abs_sum;
      if (!acc.add(d)) break;
    }

    const SeriesResult series = acc.finish();
    long double raw = acc.total();
    if (!printed) raw -= ta * tb / (v * v);
    Evaluation out;
    out.value = std::max(static_cast<double>(raw), 0.0);
    out.diagnostics.clamp_amount = std::fabs(static_cast<double>(raw) - out.value);
    // Geometric estimate of the neglected degrees from the last two.
    double tail = 0.0;
    if (trunc_.report_tail && !series.converged) {
      const long double r = prev_abs > 0 ? last_abs / prev_abs : 1.0L;
      tail = r < 1 ? static_cast<double>(last_abs * r / (1 - r)) : INFINITY;
    }
    detail::finish_diagnostics(out.diagnostics, series, out.value, tail);
    return out;
  }

 private:
  int n1_, n2_, m_;
  TruncationPolicy trunc_;
  RatioVariant variant_;
  detail::SharedDegreeSums s1_, s2_;
  double p1_ = 0, p2_ = 0, t1_ = 0, t2_ = 0, log_c_ = 0;
};

inline Evaluation ratio_density_exact(double q, int n1, int n2, const CovarianceSpec& cov1, const CovarianceSpec& cov2,
                                      const TruncationPolicy& trunc = {}, RatioVariant variant = kDefaultRatioVariant) {
  return RatioDensity(n1, n2, cov1, cov2, trunc, variant)(q);
}

}  // namespace wisheig
