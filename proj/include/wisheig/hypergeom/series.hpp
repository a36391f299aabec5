#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wisheig/combinatorics/partition.hpp"
#include "wisheig/combinatorics/pochhammer.hpp"
#include "wisheig/combinatorics/zonal.hpp"
#include "wisheig/combinatorics/zonal_table.hpp"
#include "wisheig/error.hpp"

namespace wisheig {

/// Truncation controls shared by every matrix-argument series. A series is
/// summed over degrees k = 0..max_degree and stops earlier once two
/// consecutive degrees contribute less than tail_tol times the running sum
/// in absolute value.
struct TruncationPolicy {
  // Equal-argument series reach this degree; general arguments stop at
  // ZonalTable::kMaxDegree.
  static constexpr int kMaxSeriesDegree = 1000;

  int max_degree = 60;
  double tail_tol = 1e-12;
  bool report_tail = true;

  void validate() const {
    if (max_degree < 0) throw domain_error("TruncationPolicy: max_degree must be non-negative");
    if (!(tail_tol >= 0.0)) throw domain_error("TruncationPolicy: tail_tol must be non-negative");
    if (max_degree > kMaxSeriesDegree) throw resource_error("TruncationPolicy: max_degree above 1000");
  }
};

/// Upper (alpha_1..alpha_p) and lower (beta_1..beta_q) parameters of pFq.
struct HypergeomParams {
  std::vector<double> upper;
  std::vector<double> lower;
};

struct SeriesResult {
  double value = 0.0;
  double tail_estimate = 0.0;  // total |term| of the last degree summed
  int degree_used = 0;
  bool converged = false;  // stopped on the tail criterion before max_degree
  std::vector<std::string> warnings;
};

namespace detail {

// Sum and absolute sum of the terms of one degree.
struct DegreeTerm {
  long double sum = 0.0L;
  long double abs_sum = 0.0L;
};

// Feeds degree contributions in order and decides when to stop.
class SeriesAccumulator {
 public:
  static constexpr int kGrowthRun = 5;

  explicit SeriesAccumulator(const TruncationPolicy& trunc) : trunc_(trunc) { trunc_.validate(); }

  // Returns false once no further degree is wanted.
  bool add(const DegreeTerm& d) {
    total_ += d.sum;
    history_.push_back(d.abs_sum);
    const int k = static_cast<int>(history_.size()) - 1;
    const long double bar = static_cast<long double>(trunc_.tail_tol) * std::fabs(total_);
    if (k >= 1 && history_[k] <= bar && history_[k - 1] <= bar) {
      converged_ = true;
      return false;
    }
    return k < trunc_.max_degree;
  }

  [[nodiscard]] long double total() const { return total_; }
  [[nodiscard]] int degree() const { return static_cast<int>(history_.size()) - 1; }
  [[nodiscard]] long double last_abs() const { return history_.empty() ? 0.0L : history_.back(); }

  // True when the last kGrowthRun steps all increased in magnitude.
  [[nodiscard]] bool growing() const {
    const int n = static_cast<int>(history_.size());
    if (n <= kGrowthRun) return false;
    for (int i = n - kGrowthRun; i < n; ++i)
      if (!(history_[i] > history_[i - 1])) return false;
    return true;
  }

  [[nodiscard]] SeriesResult finish() const {
    SeriesResult r;
    r.value = static_cast<double>(total_);
    r.tail_estimate = trunc_.report_tail ? static_cast<double>(last_abs()) : 0.0;
    r.degree_used = degree();
    r.converged = converged_;
    if (growing())
      r.warnings.push_back("divergence: degree contributions grew for " + std::to_string(kGrowthRun) +
                           " consecutive degrees up to k=" + std::to_string(degree()));
    if (!std::isfinite(r.value)) r.warnings.push_back("non-finite partial sum");
    return r;
  }

 private:
  TruncationPolicy trunc_;
  long double total_ = 0.0L;
  std::vector<long double> history_;
  bool converged_ = false;
};

// prod_i (alpha_i)_kappa / prod_j (beta_j)_kappa through row tables.
class CoefficientTable {
 public:
  CoefficientTable(const HypergeomParams& params, int rows, int max_part) {
    for (double a : params.upper) upper_.emplace_back(a, rows, max_part);
    for (double b : params.lower) lower_.emplace_back(b, rows, max_part);
  }

  [[nodiscard]] bool lower_vanishes(int i, int part) const {
    return std::any_of(lower_.begin(), lower_.end(), [&](const auto& t) { return t.row(i, part).sign == 0; });
  }

  [[nodiscard]] static parameter_error vanishing(int i, int part) {
    return parameter_error("hypergeometric series: a lower Pochhammer symbol vanishes at row " +
                           std::to_string(i + 1) + ", part " + std::to_string(part));
  }

  [[nodiscard]] LogValue row(int i, int part) const {
    if (lower_vanishes(i, part)) throw vanishing(i, part);
    LogValue r{0.0, 1};
    for (const auto& t : lower_) r = r / t.row(i, part);
    for (const auto& t : upper_) r = r * t.row(i, part);
    return r;
  }

  template <class Parts>
  [[nodiscard]] LogValue of(const Parts& parts) const {
    LogValue r{0.0, 1};
    for (std::size_t i = 0; i < parts.size() && parts[i] > 0; ++i) r = r * row(static_cast<int>(i), parts[i]);
    return r;
  }

 private:
  std::vector<PochhammerTable> upper_;
  std::vector<PochhammerTable> lower_;
};

inline bool all_equal(std::span<const double> x) {
  return std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end();
}

inline long double term_value(LogValue coef, long double zonal) {
  if (coef.sign == 0 || zonal == 0.0L) return 0.0L;
  return coef.sign * std::exp(static_cast<long double>(coef.log_abs)) * zonal;
}

}  // namespace detail

/// Degree sums d_k = sum_{kappa |- k, len <= m} [prod (alpha)_kappa / prod (beta)_kappa] C_kappa(X)/k!
/// for X with eigenvalues x, computed on demand. When every x_i is equal the
/// zonal values come from the closed form for C_kappa(I_m), which reaches
/// degrees in the hundreds; otherwise from a ZonalTable.
class DegreeSums {
 public:
  DegreeSums(HypergeomParams params, std::vector<double> x) : params_(std::move(params)), x_(std::move(x)) {
    if (x_.empty()) throw domain_error("hypergeometric series: empty eigenvalue vector");
    for (double v : x_)
      if (!std::isfinite(v)) throw domain_error("hypergeometric series: non-finite eigenvalue");
    scalar_ = detail::all_equal(x_);
    if (!scalar_) table_.emplace(x_);
  }

  [[nodiscard]] bool scalar_path() const noexcept { return scalar_; }
  [[nodiscard]] int variables() const noexcept { return static_cast<int>(x_.size()); }
  [[nodiscard]] int computed() const noexcept { return static_cast<int>(terms_.size()) - 1; }

  const detail::DegreeTerm& at(int k) {
    if (k < 0) throw index_error("DegreeSums: negative degree");
    const int limit = scalar_ ? TruncationPolicy::kMaxSeriesDegree : ZonalTable::kMaxDegree;
    if (k > limit) throw resource_error("DegreeSums: degree exceeds " + std::to_string(limit));
    if (k > computed()) grow(k);
    return terms_[static_cast<std::size_t>(k)];
  }

 private:
  void grow(int k) {
    // Tables are rebuilt with headroom rather than per degree.
    const int cap = std::max(k, 2 * std::max(computed(), 8));
    const int max_part = std::min(cap, scalar_ ? TruncationPolicy::kMaxSeriesDegree : ZonalTable::kMaxDegree);
    if (!coef_ || coef_max_part_ < k) {
      coef_.emplace(params_, variables(), max_part);
      if (scalar_) build_scalar_rows(max_part);
      coef_max_part_ = max_part;
    }
    while (computed() < k) terms_.push_back(compute(computed() + 1));
  }

  detail::DegreeTerm compute(int k) {
    detail::DegreeTerm d;
    if (k == 0) {
      d.sum = d.abs_sum = 1.0L;
      return d;
    }
    if (scalar_) return compute_scalar(k);
    table_->extend_to(k);
    for (const auto& e : table_->entries(k)) {
      const long double t = detail::term_value(coef_->of(e.parts), e.value);
      d.sum += t;
      d.abs_sum += std::fabs(t);
    }
    return d;
  }

  // Row factors of the closed form, padded to m rows:
  // C_kappa(I_m)/k! = 4^k (m/2)_kappa prod_{i<j}(2k_i - 2k_j - i + j) / prod_i (2k_i + m - i - 1)!
  // (rows counted from 0), combined with the series coefficient.
  void build_scalar_rows(int max_part) {
    const int m = variables();
    const std::size_t stride = static_cast<std::size_t>(max_part) + 1;
    rows_.assign(static_cast<std::size_t>(m) * stride, {});
    row_bad_.assign(static_cast<std::size_t>(m) * stride, 0);
    const detail::PochhammerTable half_m(0.5 * m, m, max_part);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j <= max_part; ++j) {
        const std::size_t idx = static_cast<std::size_t>(i) * stride + static_cast<std::size_t>(j);
        if (coef_->lower_vanishes(i, j)) {
          row_bad_[idx] = 1;  // reported only if a partition actually uses it
          continue;
        }
        LogValue r = coef_->row(i, j) * half_m.row(i, j);
        if (r.sign != 0) r.log_abs -= std::lgamma(2.0 * j + m - i);
        rows_[idx] = r;
      }
    rows_stride_ = stride;
    log_int_.resize(2 * static_cast<std::size_t>(max_part) + static_cast<std::size_t>(m) + 1);
    for (std::size_t v = 1; v < log_int_.size(); ++v) log_int_[v] = std::log(static_cast<double>(v));
  }

  detail::DegreeTerm compute_scalar(int k) {
    detail::DegreeTerm d;
    const double c = x_.front();
    if (c == 0.0) return d;
    const int m = variables();
    const double log_scale = k * (2.0 * std::numbers::ln2 + std::log(std::fabs(c)));
    const int scale_sign = (c < 0 && (k % 2)) ? -1 : 1;
    std::vector<int> parts(static_cast<std::size_t>(m), 0);

    // Leaves are accumulated in double relative to the largest log-magnitude
    // seen so far; long double exp per leaf was most of the cost.
    double offset = -INFINITY, sum = 0.0, abs_sum = 0.0;

    auto emit = [&](double log_abs, int sign) {
      if (log_abs > offset) {
        const double shrink = std::exp(offset - log_abs);
        sum *= shrink;
        abs_sum *= shrink;
        offset = log_abs;
      }
      const double t = std::exp(log_abs - offset);
      sum += sign * t;
      abs_sum += t;
    };

    // Depth-first over rows with the partial log-magnitude carried down.
    // The last row is forced to take whatever weight is left.
    auto rec = [&](auto&& self, int i, int remaining, int max_part, double log_abs, int sign) -> void {
      const int lo = (remaining + (m - i) - 1) / (m - i);  // rows below hold at most `part` each
      for (int part = std::min(remaining, max_part); part >= lo; --part) {
        const std::size_t idx = static_cast<std::size_t>(i) * rows_stride_ + static_cast<std::size_t>(part);
        if (row_bad_[idx]) throw detail::CoefficientTable::vanishing(i, part);
        const LogValue& row = rows_[idx];
        if (row.sign == 0) continue;
        double la = log_abs + row.log_abs;
        for (int j = 0; j < i; ++j)
          la += log_int_[static_cast<std::size_t>(2 * (parts[static_cast<std::size_t>(j)] - part) + i - j)];
        if (i + 1 == m) {
          emit(la, sign * row.sign);
          continue;
        }
        parts[static_cast<std::size_t>(i)] = part;
        self(self, i + 1, remaining - part, part, la, sign * row.sign);
      }
      parts[static_cast<std::size_t>(i)] = 0;
    };
    rec(rec, 0, k, k, 0.0, 1);
    if (abs_sum == 0.0) return d;
    const long double scale = std::exp(static_cast<long double>(offset) + log_scale);
    d.sum = scale_sign * sum * scale;
    d.abs_sum = abs_sum * scale;
    return d;
  }

  HypergeomParams params_;
  std::vector<double> x_;
  bool scalar_ = false;
  std::optional<ZonalTable> table_;
  std::optional<detail::CoefficientTable> coef_;
  int coef_max_part_ = -1;
  std::vector<LogValue> rows_;
  std::vector<char> row_bad_;
  std::size_t rows_stride_ = 0;
  std::vector<double> log_int_;
  std::vector<detail::DegreeTerm> terms_;
};

/// pFq(alpha; beta; A) = sum_k sum_{kappa} [prod (alpha)_kappa / prod (beta)_kappa] C_kappa(A)/k!
/// truncated per `trunc`; A given by its eigenvalues.
inline SeriesResult hyp_single(const HypergeomParams& params, std::span<const double> eigs,
                               const TruncationPolicy& trunc = {}) {
  detail::SeriesAccumulator acc(trunc);
  DegreeSums sums(params, std::vector<double>(eigs.begin(), eigs.end()));
  for (int k = 0;; ++k)
    if (!acc.add(sums.at(k))) break;
  return acc.finish();
}

/// pFq(alpha; beta; A, B) = sum_k sum_{kappa} [prod (alpha)_kappa / prod (beta)_kappa]
///   C_kappa(A) C_kappa(B) / (k! C_kappa(I_m)).
/// If B (or A) is a multiple c*I the ratio C_kappa(B)/C_kappa(I_m) is c^k and
/// the single-argument series is used.
inline SeriesResult hyp_double(const HypergeomParams& params, std::span<const double> eigs_a,
                               std::span<const double> eigs_b, const TruncationPolicy& trunc = {}) {
  if (eigs_a.size() != eigs_b.size()) throw domain_error("hyp_double: arguments differ in dimension");
  if (eigs_a.empty()) throw domain_error("hyp_double: empty eigenvalue vector");
  if (detail::all_equal(eigs_a)) std::swap(eigs_a, eigs_b);
  if (detail::all_equal(eigs_b)) {
    const double c = eigs_b.front();
    std::vector<double> scaled(eigs_a.begin(), eigs_a.end());
    detail::SeriesAccumulator acc(trunc);
    DegreeSums sums(params, scaled);
    long double ck = 1.0L;
    for (int k = 0;; ++k) {
      detail::DegreeTerm d = sums.at(k);
      d.sum *= ck;
      d.abs_sum *= std::fabs(ck);
      ck *= c;
      if (!acc.add(d)) break;
    }
    return acc.finish();
  }

  trunc.validate();
  const int m = static_cast<int>(eigs_a.size());
  ZonalTable ta(eigs_a), tb(eigs_b);
  detail::CoefficientTable coef(params, m, std::max(trunc.max_degree, 1));
  detail::SeriesAccumulator acc(trunc);
  for (int k = 0;; ++k) {
    ta.extend_to(k);
    tb.extend_to(k);
    const auto& ea = ta.entries(k);
    const auto& eb = tb.entries(k);
    detail::DegreeTerm d;
    const double log_kfact = std::lgamma(k + 1.0);
    for (std::size_t i = 0; i < ea.size(); ++i) {
      const Partition kappa(ea[i].parts);
      LogValue c = coef.of(ea[i].parts);
      c.log_abs += log_kfact - log_zonal_unit(kappa, m);
      const long double t = detail::term_value(c, ea[i].value * eb[i].value);
      d.sum += t;
      d.abs_sum += std::fabs(t);
    }
    if (!acc.add(d)) break;
  }
  return acc.finish();
}

}  // namespace wisheig
