#pragma once

#include <cmath>
#include <numbers>

#include "wisheig/combinatorics/pochhammer.hpp"
#include "wisheig/covariance.hpp"
#include "wisheig/error.hpp"

namespace wisheig {

inline constexpr double kDegeneracyGap = 1e-10;

/// log of the Laplace-approximated joint density of l_1 > ... > l_n:
///   pi^{n(n-m)/2} / (2^{nm/2} |Sigma|^{n/2} Gamma_n(n/2)) prod l_i^{(m-n-1)/2} prod_{i<j} (l_i - l_j)
///   exp(-sum l_i / (2 lambda_i)) prod_{i<j<=n} (2 pi / c_ij)^{1/2} prod_{i<=n<j} (2 pi / d_ij)^{1/2},
/// c_ij = (l_i - l_j)(lambda_i - lambda_j)/(lambda_i lambda_j), d_ij = l_i (lambda_i - lambda_j)/(lambda_i lambda_j).
inline double laplace_log_joint_density(const EigenSample& sample, const CovarianceSpec& cov) {
  const int n = sample.n(), m = cov.m();
  if (sample.m != 0 && sample.m != m) throw domain_error("laplace density: sample and covariance differ in m");
  if (!(n >= 1 && m > n)) throw domain_error("laplace density: need m > n >= 1");
  const auto& l = sample.ells;
  const auto& lam = cov.lambdas();
  for (int i = 0; i < n; ++i) {
    if (!(l[i] > 0.0) || !std::isfinite(l[i])) throw domain_error("laplace density: eigenvalues must be positive");
    if (i > 0 && l[i] > l[i - 1]) throw domain_error("laplace density: eigenvalues must be descending");
    if (i > 0 && l[i] == l[i - 1]) throw degeneracy_error("laplace density: tied sample eigenvalues");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < m; ++j)
      if ((lam[i] - lam[j]) / lam[i] < kDegeneracyGap)
        throw degeneracy_error("laplace density: population eigenvalues " + std::to_string(i + 1) + " and " +
                               std::to_string(j + 1) + " are not distinct");

  constexpr double log_2pi = std::numbers::ln2 + 1.1447298858494002;  // log 2 + log pi
  double r = 0.5 * n * (n - m) * std::log(std::numbers::pi) - 0.5 * n * m * std::numbers::ln2 -
             0.5 * n * cov.log_det() - log_multivariate_gamma(n, 0.5 * n);
  for (int i = 0; i < n; ++i) {
    r += 0.5 * (m - n - 1) * std::log(l[i]) - 0.5 * l[i] / lam[i];
    for (int j = i + 1; j < n; ++j) {
      const double c = (l[i] - l[j]) * (lam[i] - lam[j]) / (lam[i] * lam[j]);
      r += std::log(l[i] - l[j]) + 0.5 * (log_2pi - std::log(c));
    }
    for (int j = n; j < m; ++j) {
      const double d = l[i] * (lam[i] - lam[j]) / (lam[i] * lam[j]);
      r += 0.5 * (log_2pi - std::log(d));
    }
  }
  return r;
}

inline double laplace_joint_density(const EigenSample& sample, const CovarianceSpec& cov) {
  return std::exp(laplace_log_joint_density(sample, cov));
}

}  // namespace wisheig
