#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "wisheig/combinatorics/partition.hpp"
#include "wisheig/error.hpp"

namespace wisheig {

/// Generalized Pochhammer symbol (alpha)_kappa = prod_i (alpha - (i-1)/2)_{kappa_i}
/// with the ordinary rising factorial in each row. May be zero or negative.
inline double pochhammer_partition(double alpha, const Partition& kappa) {
  double r = 1.0;
  for (int i = 0; i < kappa.length(); ++i) {
    const double base = alpha - 0.5 * i;
    for (int j = 0; j < kappa[static_cast<std::size_t>(i)]; ++j) r *= base + j;
  }
  return r;
}

/// log Gamma_m(a) = m(m-1)/4 log(pi) + sum_i log Gamma(a - (i-1)/2).
inline double log_multivariate_gamma(int m, double a) {
  if (m < 1) throw domain_error("log_multivariate_gamma: m must be at least 1");
  double r = 0.25 * m * (m - 1) * std::log(std::numbers::pi);
  for (int i = 0; i < m; ++i) {
    const double arg = a - 0.5 * i;
    if (!(arg > 0.0)) throw domain_error("log_multivariate_gamma: non-positive gamma argument");
    r += std::lgamma(arg);
  }
  return r;
}

/// Signed log-magnitude. A zero is represented by sign == 0.
struct LogValue {
  double log_abs = -INFINITY;
  int sign = 0;

  static LogValue from(double v) {
    if (v == 0.0) return {};
    return {std::log(std::fabs(v)), v > 0 ? 1 : -1};
  }
  [[nodiscard]] double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }
  friend LogValue operator*(LogValue a, LogValue b) {
    if (a.sign == 0 || b.sign == 0) return {};
    return {a.log_abs + b.log_abs, a.sign * b.sign};
  }
  friend LogValue operator/(LogValue a, LogValue b) {
    if (b.sign == 0) throw domain_error("LogValue: division by zero");
    if (a.sign == 0) return {};
    return {a.log_abs - b.log_abs, a.sign * b.sign};
  }
};

namespace detail {

// Row-wise prefix tables of log|(alpha - i/2)_j| and its sign for
// i < rows, j <= max_part, so (alpha)_kappa is a product of table lookups.
class PochhammerTable {
 public:
  PochhammerTable(double alpha, int rows, int max_part)
      : stride_(static_cast<std::size_t>(max_part) + 1),
        log_abs_(static_cast<std::size_t>(rows) * stride_),
        sign_(static_cast<std::size_t>(rows) * stride_) {
    for (int i = 0; i < rows; ++i) {
      const double base = alpha - 0.5 * i;
      double acc = 0.0;
      int sg = 1;
      for (int j = 0; j <= max_part; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * stride_ + static_cast<std::size_t>(j);
        log_abs_[idx] = acc;
        sign_[idx] = sg;
        const double f = base + j;
        if (sg != 0) {
          if (f == 0.0) {
            sg = 0;
            acc = -INFINITY;
          } else {
            acc += std::log(std::fabs(f));
            if (f < 0) sg = -sg;
          }
        }
      }
    }
  }

  [[nodiscard]] LogValue row(int i, int part) const {
    const std::size_t idx = static_cast<std::size_t>(i) * stride_ + static_cast<std::size_t>(part);
    return sign_[idx] == 0 ? LogValue{} : LogValue{log_abs_[idx], sign_[idx]};
  }

  template <class Parts>
  [[nodiscard]] LogValue of(const Parts& parts) const {
    LogValue r{0.0, 1};
    for (std::size_t i = 0; i < parts.size() && parts[i] > 0; ++i) r = r * row(static_cast<int>(i), parts[i]);
    return r;
  }

 private:
  std::size_t stride_;
  std::vector<double> log_abs_;
  std::vector<int> sign_;
};

}  // namespace detail
}  // namespace wisheig
