#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "wisheig/error.hpp"

namespace wisheig {

/// lambda_i = a^{b/i}, i = 1..m: a spiked diagonal covariance.
struct SpikedCovParams {
  double a = 200.0;
  double b = 3.0;
  int m = 50;

  [[nodiscard]] std::vector<double> lambdas() const {
    if (!(a > 0.0) || !(b > 0.0)) throw domain_error("SpikedCovParams: a and b must be positive");
    if (m < 1) throw domain_error("SpikedCovParams: m must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int i = 1; i <= m; ++i) out[static_cast<std::size_t>(i - 1)] = std::pow(a, b / i);
    return out;
  }
};

/// Population eigenvalues lambda_1 >= ... >= lambda_m > 0. Input in any
/// order is sorted descending.
class CovarianceSpec {
 public:
  CovarianceSpec() = default;
  explicit CovarianceSpec(std::vector<double> lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.empty()) throw domain_error("CovarianceSpec: no eigenvalues");
    for (double v : lambdas_)
      if (!(v > 0.0) || !std::isfinite(v)) throw domain_error("CovarianceSpec: eigenvalues must be positive and finite");
    std::sort(lambdas_.begin(), lambdas_.end(), std::greater<>());
  }
  explicit CovarianceSpec(const SpikedCovParams& p) : CovarianceSpec(p.lambdas()) {}

  static CovarianceSpec identity(int m, double scale = 1.0) {
    return CovarianceSpec(std::vector<double>(static_cast<std::size_t>(m), scale));
  }

  [[nodiscard]] int m() const noexcept { return static_cast<int>(lambdas_.size()); }
  [[nodiscard]] const std::vector<double>& lambdas() const noexcept { return lambdas_; }
  [[nodiscard]] double operator[](std::size_t i) const { return lambdas_.at(i); }

  [[nodiscard]] bool strictly_descending() const {
    return std::adjacent_find(lambdas_.begin(), lambdas_.end(), std::less_equal<>()) == lambdas_.end();
  }
  [[nodiscard]] double log_det() const {
    double s = 0.0;
    for (double v : lambdas_) s += std::log(v);
    return s;
  }
  [[nodiscard]] double trace_inverse() const {
    double s = 0.0;
    for (double v : lambdas_) s += 1.0 / v;
    return s;
  }
  // c / lambda_i, in the order of lambdas().
  [[nodiscard]] std::vector<double> inverse_scaled(double c) const {
    std::vector<double> out(lambdas_.size());
    std::transform(lambdas_.begin(), lambdas_.end(), out.begin(), [c](double v) { return c / v; });
    return out;
  }
  [[nodiscard]] CovarianceSpec scaled(double c) const {
    std::vector<double> out(lambdas_);
    for (double& v : out) v *= c;
    return CovarianceSpec(std::move(out));
  }

 private:
  std::vector<double> lambdas_;
};

/// Nonzero eigenvalues l_1 > ... > l_n > 0 of one Wishart draw W_m(n, Sigma).
struct EigenSample {
  std::vector<double> ells;
  int m = 0;

  [[nodiscard]] int n() const noexcept { return static_cast<int>(ells.size()); }

  // Throws unless the sample is strictly descending, positive and n < m.
  void validate() const {
    if (ells.empty()) throw domain_error("EigenSample: no eigenvalues");
    if (n() >= m) throw domain_error("EigenSample: need n < m");
    for (std::size_t i = 0; i < ells.size(); ++i) {
      if (!(ells[i] > 0.0) || !std::isfinite(ells[i])) throw domain_error("EigenSample: eigenvalues must be positive");
      if (i > 0 && !(ells[i] < ells[i - 1])) throw domain_error("EigenSample: eigenvalues must be strictly descending");
    }
  }
};

}  // namespace wisheig
