#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "wisheig/covariance.hpp"
#include "wisheig/error.hpp"
#include "wisheig/scalardist.hpp"

namespace wisheig {

/// rho_k = max_{i<=k} lambda_{i+1} / lambda_i.
inline double spike_dispersion_rho(const CovarianceSpec& cov, int k) {
  if (k < 1 || k + 1 > cov.m()) throw index_error("spike_dispersion_rho: need 1 <= k and k + 1 <= m");
  double r = 0.0;
  for (int i = 0; i < k; ++i) r = std::max(r, cov[static_cast<std::size_t>(i + 1)] / cov[static_cast<std::size_t>(i)]);
  return r;
}

/// r_k = max_{i<=k} l_{i+1} / l_i (all ratios between sample eigenvalues).
inline double sample_dispersion_rk(const EigenSample& sample, int k) {
  if (k < 1 || k + 1 > sample.n()) throw index_error("sample_dispersion_rk: need 1 <= k and k + 1 <= n");
  double r = 0.0;
  for (int i = 0; i < k; ++i)
    r = std::max(r, sample.ells[static_cast<std::size_t>(i + 1)] / sample.ells[static_cast<std::size_t>(i)]);
  return r;
}

namespace detail {
inline ChiSquare approx_dof(int i, int n, double lambda_i) {
  if (i < 1 || i > n) throw domain_error("chi-square approximation: need 1 <= i <= n");
  if (!(lambda_i > 0.0)) throw domain_error("chi-square approximation: lambda_i must be positive");
  return ChiSquare(n - i + 1);
}
}  // namespace detail

/// Pr(l_i < x) ~ chisq_cdf(x / lambda_i, n - i + 1) under strong spiking.
inline double chisq_approx_cdf(double x, int i, int n, double lambda_i) {
  return chisq_cdf(x / lambda_i, detail::approx_dof(i, n, lambda_i));
}

inline double chisq_approx_quantile(double p, int i, int n, double lambda_i) {
  return lambda_i * chisq_quantile(p, detail::approx_dof(i, n, lambda_i));
}

struct EqualityTestResult {
  double statistic = 0.0;
  int dof1 = 0;
  int dof2 = 0;
  double p_value = 1.0;
  std::optional<double> reject_at;  // significance level tested, if any
  bool rejected = false;
};

/// Test of H0: lambda_k^(1) = lambda_k^(2) with
///   F = [l_k^(1) / (n1 - k + 1)] / [l_k^(2) / (n2 - k + 1)] ~ F(n1 - k + 1, n2 - k + 1),
/// two-sided p-value 2 min(F_cdf, 1 - F_cdf).
inline EqualityTestResult equality_test(double ellk1, double ellk2, int k, int n1, int n2,
                                        std::optional<double> alpha = std::nullopt) {
  if (!(ellk1 > 0.0 && ellk2 > 0.0)) throw domain_error("equality_test: eigenvalues must be positive");
  if (k < 1 || k > std::min(n1, n2)) throw domain_error("equality_test: need 1 <= k <= min(n1, n2)");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw domain_error("equality_test: alpha must lie in (0, 1)");
  EqualityTestResult r;
  r.dof1 = n1 - k + 1;
  r.dof2 = n2 - k + 1;
  r.statistic = (ellk1 / r.dof1) / (ellk2 / r.dof2);
  const FDist f(r.dof1, r.dof2);
  const double lower = f_cdf(r.statistic, f);
  const double upper = f_cdf(1.0 / r.statistic, FDist(r.dof2, r.dof1));  // 1 - lower without cancellation
  r.p_value = std::min(1.0, 2.0 * std::min(lower, upper));
  r.reject_at = alpha;
  r.rejected = alpha && r.p_value < *alpha;
  return r;
}

}  // namespace wisheig
