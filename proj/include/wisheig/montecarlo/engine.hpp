#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "wisheig/covariance.hpp"
#include "wisheig/error.hpp"
#include "wisheig/montecarlo/philox.hpp"

namespace wisheig {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

/// Eigenvalues of a symmetric n x n matrix (row-major, overwritten) by cyclic
/// Jacobi rotations, stopping once the off-diagonal Frobenius norm falls to
/// 1e-12 times the Frobenius norm of the input. Sorted descending into out.
inline void jacobi_eigenvalues(std::span<double> a, int n, std::span<double> out) {
  const auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
  double frob = 0.0;
  for (double v : a) frob += v * v;
  const double tol = 1e-12 * std::sqrt(frob);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += at(p, q) * at(p, q);
    if (std::sqrt(2.0 * off) <= tol) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        double t = std::fabs(theta) > 1e150 ? 0.5 / theta
                                            : std::copysign(1.0, theta) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        at(p, p) -= t * apq;
        at(q, q) += t * apq;
        at(p, q) = at(q, p) = 0.0;
        for (int k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = at(p, k) = c * akp - s * akq;
          at(k, q) = at(q, k) = s * akp + c * akq;
        }
      }
  }
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = at(i, i);
  std::sort(out.begin(), out.end(), std::greater<>());
}

/// Eigenvalues of X^T X for an m x n matrix X (column-major, overwritten),
/// m >= n, descending. X^T X is never formed: Householder QR with column
/// pivoting gives R, then one-sided Jacobi orthogonalises the rows of R and the
/// answers are their squared norms. With the rows of X ordered by decreasing
/// scale this keeps the small eigenvalues accurate relative to themselves,
/// where the Gram route loses everything below eps times the largest.
inline void squared_singular_values(std::span<double> x, int m, int n, std::span<double> out) {
  const auto at = [&](int i, int j) -> double& { return x[static_cast<std::size_t>(j) * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = -1.0;
    for (int j = k; j < n; ++j) {
      double s = 0.0;
      for (int i = k; i < m; ++i) s += at(i, j) * at(i, j);
      if (s > best) best = s, piv = j;
    }
    if (piv != k)
      for (int i = 0; i < m; ++i) std::swap(at(i, k), at(i, piv));
    const double norm = std::sqrt(best);
    if (norm == 0.0) continue;
    const double x0 = at(k, k);
    const double alpha = x0 > 0.0 ? -norm : norm;
    // v = x_k - alpha e_k, stored in place
    at(k, k) -= alpha;
    const double vtv = 2.0 * norm * (norm + std::fabs(x0));
    for (int j = k + 1; j < n; ++j) {
      double d = 0.0;
      for (int i = k; i < m; ++i) d += at(i, k) * at(i, j);
      const double f = 2.0 * d / vtv;
      for (int i = k; i < m; ++i) at(i, j) -= f * at(i, k);
    }
    at(k, k) = alpha;
    for (int i = k + 1; i < m; ++i) at(i, k) = 0.0;
  }
  // rows of the upper triangle now hold R
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        double a = 0.0, b = 0.0, g = 0.0;
        for (int j = 0; j < n; ++j) {
          a += at(p, j) * at(p, j);
          b += at(q, j) * at(q, j);
          g += at(p, j) * at(q, j);
        }
        if (std::fabs(g) <= eps * std::sqrt(a * b)) continue;
        rotated = true;
        const double zeta = (b - a) / (2.0 * g);
        const double t = std::copysign(1.0, zeta) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
        for (int j = 0; j < n; ++j) {
          const double u = at(p, j), v = at(q, j);
          at(p, j) = c * u - s * v;
          at(q, j) = s * u + c * v;
        }
      }
    if (!rotated) break;
  }
  for (int p = 0; p < n; ++p) {
    double a = 0.0;
    for (int j = 0; j < n; ++j) a += at(p, j) * at(p, j);
    out[static_cast<std::size_t>(p)] = a;
  }
  std::sort(out.begin(), out.begin() + n, std::greater<>());
}

/// Draws the n nonzero eigenvalues of W = X X^T, X ~ N_{m,n}(0, Sigma (x) I_n),
/// with Sigma diagonal. X is generated row by row (i = 1..m, then
/// j = 1..n), x_ij = sqrt(lambda_i) z_ij, and the eigenvalues are those of
/// X^T X (see squared_singular_values). Buffers are reused across draws.
class WishartSampler {
 public:
  WishartSampler(int m, int n, const CovarianceSpec& cov) : m_(m), n_(n) {
    if (!(n >= 1 && m > n)) throw domain_error("WishartSampler: need m > n >= 1");
    if (cov.m() != m) throw domain_error("WishartSampler: covariance dimension differs from m");
    for (double l : cov.lambdas()) root_.push_back(std::sqrt(l));
    x_.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(n));
    sample_.m = m;
    sample_.ells.resize(static_cast<std::size_t>(n));
  }

  const EigenSample& draw(ReplicationStream& rng) {
    const auto mm = static_cast<std::size_t>(m_);
    for (int i = 0; i < m_; ++i) {
      const double r = root_[static_cast<std::size_t>(i)];
      for (int j = 0; j < n_; ++j) x_[static_cast<std::size_t>(j) * mm + static_cast<std::size_t>(i)] = r * rng.normal();
    }
    squared_singular_values(x_, m_, n_, sample_.ells);
    return sample_;
  }

  [[nodiscard]] int m() const noexcept { return m_; }
  [[nodiscard]] int n() const noexcept { return n_; }

 private:
  int m_, n_;
  std::vector<double> root_, x_;
  EigenSample sample_;
};

inline EigenSample sample_eigenvalues(int m, int n, const CovarianceSpec& cov, ReplicationStream& stream) {
  WishartSampler s(m, n, cov);
  return s.draw(stream);
}

/// One draw for replication `replication` of the stream keyed by `seed`.
inline EigenSample sample_eigenvalues(int m, int n, const CovarianceSpec& cov, std::uint64_t seed,
                                      std::uint64_t replication) {
  ReplicationStream rng(seed, replication);
  return sample_eigenvalues(m, n, cov, rng);
}

/// Sorted Monte Carlo sample.
class EmpiricalDistribution {
 public:
  EmpiricalDistribution() = default;
  explicit EmpiricalDistribution(std::vector<double> values) : values_(std::move(values)) {
    for (double v : values_)
      if (std::isnan(v)) throw domain_error("EmpiricalDistribution: NaN value");
    std::sort(values_.begin(), values_.end());
  }

  [[nodiscard]] const std::vector<double>& sorted_values() const noexcept { return values_; }
  [[nodiscard]] std::size_t count() const noexcept { return values_.size(); }

  // Type 7: linear interpolation at position 1 + p (N - 1) (1-based).
  [[nodiscard]] double quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw domain_error("empirical_quantile: p must lie in (0, 1)");
    if (values_.size() < 2) throw domain_error("empirical_quantile: need at least two values");
    const double h = p * static_cast<double>(values_.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values_.size()) return values_.back();
    return values_[lo] + (h - static_cast<double>(lo)) * (values_[lo + 1] - values_[lo]);
  }

  // Fraction of values <= x.
  [[nodiscard]] double cdf_at(double x) const {
    if (values_.empty()) return 0.0;
    const auto it = std::upper_bound(values_.begin(), values_.end(), x);
    return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
  }

 private:
  std::vector<double> values_;
};

inline double empirical_quantile(const EmpiricalDistribution& d, double p) { return d.quantile(p); }
inline double empirical_cdf_at(const EmpiricalDistribution& d, double x) { return d.cdf_at(x); }

/// sup_x |F_N(x) - F(x)|, checking both sides of every step.
inline double ks_distance(const EmpiricalDistribution& d, const std::function<double(double)>& cdf) {
  const auto& v = d.sorted_values();
  if (v.empty()) throw domain_error("ks_distance: empty distribution");
  const double n = static_cast<double>(v.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    worst = std::max({worst, std::fabs(f - static_cast<double>(i) / n), std::fabs(static_cast<double>(i + 1) / n - f)});
  }
  return worst;
}

struct SimConfig {
  int m = 50;
  int n = 10;
  CovarianceSpec cov;
  std::int64_t reps = 1000000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;  // 0 picks the hardware concurrency

  void validate() const {
    if (!(n >= 1 && m > n)) throw domain_error("SimConfig: need m > n >= 1");
    if (reps < 1) throw domain_error("SimConfig: reps must be at least 1");
    if (cov.m() != m) throw domain_error("SimConfig: covariance dimension differs from m");
    if (workers < 0) throw domain_error("SimConfig: workers must be non-negative");
  }
};

using Statistic = std::function<double(const EigenSample&)>;
using PairStatistic = std::function<double(const EigenSample&, const EigenSample&)>;

namespace detail {

inline constexpr double kMaxWork = 1e13;             // reps * m * n
inline constexpr double kMaxResultBytes = 2.0e9;     // stored statistic values

inline void check_budget(std::int64_t reps, double per_rep_work, std::size_t stats) {
  if (static_cast<double>(reps) * per_rep_work > kMaxWork)
    throw resource_error("simulation: reps x m x n exceeds the work budget");
  if (static_cast<double>(reps) * static_cast<double>(stats) * sizeof(double) > kMaxResultBytes)
    throw resource_error("simulation: result storage exceeds the memory budget");
}

inline int resolve_workers(int requested, std::int64_t reps) {
  int w = requested == 0 ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : requested;
  return static_cast<int>(std::min<std::int64_t>(w, reps));
}

// Runs body(rep, stream, out) for rep in [0, reps) over `workers` threads;
// out points at the `stats` result slots of that replication.
template <class MakeWorker>
std::vector<std::vector<double>> run_replications(std::int64_t reps, std::size_t stats, std::uint64_t seed,
                                                  int workers, MakeWorker make_worker) {
  std::vector<std::vector<double>> results(stats, std::vector<double>(static_cast<std::size_t>(reps)));
  const int w = resolve_workers(workers, reps);
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run_range = [&](std::int64_t begin, std::int64_t end) {
    try {
      auto body = make_worker();
      std::vector<double> out(stats);
      for (std::int64_t r = begin; r < end; ++r) {
        ReplicationStream rng(seed, static_cast<std::uint64_t>(r));
        body(rng, out);
        for (std::size_t s = 0; s < stats; ++s) results[s][static_cast<std::size_t>(r)] = out[s];
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };
  if (w <= 1) {
    run_range(0, reps);
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < w; ++t) threads.emplace_back(run_range, reps * t / w, reps * (t + 1) / w);
    for (auto& th : threads) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace detail

/// Evaluates every statistic on `reps` independent draws. Replication r
/// always uses the stream (seed, r), so the output is identical for any
/// number of workers.
inline std::vector<EmpiricalDistribution> run_simulation(const SimConfig& config,
                                                         const std::vector<Statistic>& statistics) {
  config.validate();
  if (statistics.empty()) throw domain_error("run_simulation: no statistic");
  detail::check_budget(config.reps, static_cast<double>(config.m) * config.n, statistics.size());
  auto columns = detail::run_replications(config.reps, statistics.size(), config.seed, config.workers, [&] {
    return [sampler = WishartSampler(config.m, config.n, config.cov), &statistics](ReplicationStream& rng,
                                                                                  std::vector<double>& out) mutable {
      const EigenSample& s = sampler.draw(rng);
      for (std::size_t i = 0; i < statistics.size(); ++i) out[i] = statistics[i](s);
    };
  });
  std::vector<EmpiricalDistribution> out;
  for (auto& c : columns) out.emplace_back(std::move(c));
  return out;
}

inline EmpiricalDistribution run_simulation(const SimConfig& config, const Statistic& statistic) {
  return std::move(run_simulation(config, std::vector<Statistic>{statistic}).front());
}

/// Two independent populations per replication; population 1 is drawn
/// first from the replication's stream, then population 2. Only
/// `first.reps`, `first.seed` and `first.workers` are used.
inline std::vector<EmpiricalDistribution> run_two_population(const SimConfig& first, const SimConfig& second,
                                                             const std::vector<PairStatistic>& statistics) {
  first.validate();
  SimConfig s2 = second;
  s2.reps = first.reps;
  s2.validate();
  if (statistics.empty()) throw domain_error("run_two_population: no statistic");
  detail::check_budget(first.reps, static_cast<double>(first.m) * first.n + static_cast<double>(second.m) * second.n,
                       statistics.size());
  auto columns = detail::run_replications(first.reps, statistics.size(), first.seed, first.workers, [&] {
    return [a = WishartSampler(first.m, first.n, first.cov), b = WishartSampler(second.m, second.n, second.cov),
            &statistics](ReplicationStream& rng, std::vector<double>& out) mutable {
      const EigenSample& x = a.draw(rng);
      const EigenSample& y = b.draw(rng);
      for (std::size_t i = 0; i < statistics.size(); ++i) out[i] = statistics[i](x, y);
    };
  });
  std::vector<EmpiricalDistribution> out;
  for (auto& c : columns) out.emplace_back(std::move(c));
  return out;
}

}  // namespace wisheig
