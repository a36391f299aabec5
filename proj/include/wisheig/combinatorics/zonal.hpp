#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wisheig/combinatorics/partition.hpp"
#include "wisheig/combinatorics/pochhammer.hpp"
#include "wisheig/error.hpp"

namespace wisheig {

using Rational = boost::multiprecision::cpp_rational;

/// Zonal polynomial C_kappa written in the monomial symmetric function basis,
/// C_kappa = sum_lambda c_{kappa,lambda} M_lambda, restricted to monomials with
/// at most `max_parts` parts (the others vanish on max_parts variables).
struct ZonalExpansion {
  struct Term {
    Partition lambda;
    double coefficient = 0.0;
    std::optional<Rational> exact;  // present when computed in exact arithmetic
  };

  Partition kappa;
  int max_parts = 0;
  std::vector<Term> terms;  // reverse-lexicographic, kappa first

  [[nodiscard]] bool is_exact() const { return !terms.empty() && terms.front().exact.has_value(); }
  [[nodiscard]] std::optional<double> coefficient(const Partition& lambda) const {
    for (const auto& t : terms)
      if (t.lambda == lambda) return t.coefficient;
    return std::nullopt;
  }
};

/// Monomial symmetric function M_lambda(x): sum of x^a over distinct
/// rearrangements a of lambda padded with zeros to x.size().
inline double monomial_symmetric(const Partition& lambda, std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  if (lambda.length() > n) return 0.0;
  if (lambda.empty()) return 1.0;

  std::vector<int> values;
  std::vector<int> counts;
  for (int p : lambda.parts()) {
    if (!values.empty() && values.back() == p) {
      ++counts.back();
    } else {
      values.push_back(p);
      counts.push_back(1);
    }
  }
  values.push_back(0);
  counts.push_back(n - lambda.length());

  // Memoised over the multiset of unassigned exponents; the next variable
  // index is implied by how many exponents have been assigned.
  std::vector<std::uint64_t> radix(counts.size());
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    radix[i] = r;
    r *= static_cast<std::uint64_t>(counts[i]) + 1;
  }
  std::unordered_map<std::uint64_t, double> memo;
  std::vector<int> left = counts;

  auto rec = [&](auto&& self, int var, std::uint64_t key) -> double {
    if (var == n) return 1.0;
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double s = 0.0;
    for (std::size_t v = 0; v < left.size(); ++v) {
      if (left[v] == 0) continue;
      --left[v];
      const double sub = self(self, var + 1, key - radix[v]);
      ++left[v];
      s += (values[v] == 0 ? 1.0 : std::pow(x[static_cast<std::size_t>(var)], values[v])) * sub;
    }
    memo.emplace(key, s);
    return s;
  };
  std::uint64_t key = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) key += radix[i] * static_cast<std::uint64_t>(counts[i]);
  return rec(rec, 0, key);
}

/// log C_kappa(I_m) from the closed form
/// 2^{2k} k! (m/2)_kappa prod_{i<j}(2k_i - 2k_j - i + j) / prod_i (2k_i + p - i)!.
/// Returns -inf when kappa has more than m parts (C_kappa(I_m) = 0).
inline double log_zonal_unit(const Partition& kappa, int m) {
  if (m < 1) throw domain_error("zonal_unit: m must be at least 1");
  if (kappa.length() > m) return -INFINITY;
  const int k = kappa.weight();
  const int p = kappa.length();
  double r = 2.0 * k * std::numbers::ln2 + std::lgamma(k + 1.0);
  for (int i = 0; i < p; ++i) {
    const double base = 0.5 * m - 0.5 * i;
    const int ki = kappa[static_cast<std::size_t>(i)];
    r += std::lgamma(base + ki) - std::lgamma(base);
    for (int j = i + 1; j < p; ++j) r += std::log(2.0 * (ki - kappa[static_cast<std::size_t>(j)]) - i + j);
    r -= std::lgamma(2.0 * ki + p - i);
  }
  return r;
}

/// C_kappa(I_m).
inline double zonal_unit(const Partition& kappa, int m) { return std::exp(log_zonal_unit(kappa, m)); }

namespace detail {

inline Rational factorial_q(int n) {
  boost::multiprecision::cpp_int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

// Exact closed form of C_kappa(I_m) for m >= length(kappa).
inline Rational zonal_unit_exact(const Partition& kappa, int m) {
  const int k = kappa.weight();
  const int p = kappa.length();
  Rational r = factorial_q(k);
  for (int i = 0; i < 2 * k; ++i) r *= 2;
  for (int i = 0; i < p; ++i) {
    const int ki = kappa[static_cast<std::size_t>(i)];
    // (m/2 - i/2)_{ki} = prod_j (m - i + 2j)/2
    for (int j = 0; j < ki; ++j) r *= Rational(m - i + 2 * j, 2);
    for (int j = i + 1; j < p; ++j) r *= 2 * (ki - kappa[static_cast<std::size_t>(j)]) - i + j;
    r /= factorial_q(2 * ki + p - i - 1);
  }
  return r;
}

inline long long rho(const std::vector<int>& parts) {
  long long r = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) r += static_cast<long long>(parts[i]) * (parts[i] - static_cast<long long>(i) - 1);
  return r;
}

// Number of distinct arrangements of lambda padded to p slots, i.e. M_lambda(I_p).
inline Rational monomial_unit_count(const Partition& lambda, int p) {
  Rational r = factorial_q(p) / factorial_q(p - lambda.length());
  const auto& parts = lambda.parts();
  for (std::size_t i = 0; i < parts.size();) {
    std::size_t j = i;
    while (j < parts.size() && parts[j] == parts[i]) ++j;
    r /= factorial_q(static_cast<int>(j - i));
    i = j;
  }
  return r;
}

// James' recursion on dominated partitions:
//   c_{k,l} = sum_{l < mu <= k} ((l_i + t) - (l_j - t)) c_{k,mu} / (rho_k - rho_l),
// mu obtained from l by moving t units from part j to part i (i < j), then
// normalised so the expansion at I_p matches the closed form.
template <class Scalar>
std::vector<std::pair<Partition, Scalar>> james_recursion(const Partition& kappa, int max_parts) {
  const int k = kappa.weight();
  std::vector<Partition> lambdas;
  for (auto& l : enumerate_partitions(k, std::max(max_parts, 1)))
    if (l.dominated_by(kappa)) lambdas.push_back(std::move(l));
  // enumerate_partitions is reverse-lexicographic, a linear extension of
  // dominance, so every mu above lambda is visited first.
  std::unordered_map<Partition, std::size_t, PartitionHash> index;
  for (std::size_t i = 0; i < lambdas.size(); ++i) index.emplace(lambdas[i], i);

  std::vector<Scalar> c(lambdas.size(), Scalar(0));
  const long long rho_k = rho(kappa.parts());
  for (std::size_t a = 0; a < lambdas.size(); ++a) {
    if (a == 0) {
      c[a] = Scalar(1);
      continue;
    }
    const auto& l = lambdas[a].parts();
    Scalar acc(0);
    for (std::size_t j = 1; j < l.size(); ++j) {
      for (std::size_t i = 0; i < j; ++i) {
        for (int t = 1; t <= l[j]; ++t) {
          std::vector<int> mu = l;
          mu[i] += t;
          mu[j] -= t;
          std::sort(mu.begin(), mu.end(), std::greater<>());
          auto it = index.find(Partition(std::move(mu)));
          if (it == index.end()) continue;
          acc += Scalar((l[i] + t) - (l[j] - t)) * c[it->second];
        }
      }
    }
    c[a] = acc / Scalar(rho_k - rho(l));
  }

  std::vector<std::pair<Partition, Scalar>> out;
  out.reserve(lambdas.size());
  for (std::size_t a = 0; a < lambdas.size(); ++a) out.emplace_back(std::move(lambdas[a]), c[a]);
  return out;
}

}  // namespace detail

/// Memo of zonal expansions keyed by (kappa, max_parts). Entries are immutable
/// once inserted; lookups take a shared lock and insertion an exclusive one.
class ZonalCache {
 public:
  static constexpr int kExactWeightLimit = 20;
  static constexpr int kDefaultMaxDegree = 60;

  explicit ZonalCache(int max_degree = kDefaultMaxDegree) : max_degree_(max_degree) {}

  static ZonalCache& global() {
    static ZonalCache cache;
    return cache;
  }

  [[nodiscard]] int max_degree() const {
    std::shared_lock lock(mutex_);
    return max_degree_;
  }
  void set_max_degree(int k) {
    std::unique_lock lock(mutex_);
    max_degree_ = k;
  }

  std::shared_ptr<const ZonalExpansion> get(const Partition& kappa, int max_parts) {
    const int k = kappa.weight();
    max_parts = std::clamp(max_parts, 1, std::max(k, 1));
    {
      std::shared_lock lock(mutex_);
      if (k > max_degree_) throw resource_error("zonal_expansion: weight exceeds configured maximum degree");
      if (auto it = entries_.find(Key{kappa, max_parts}); it != entries_.end()) return it->second;
    }
    auto built = std::make_shared<const ZonalExpansion>(build(kappa, max_parts));
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(Key{kappa, max_parts}, std::move(built)).first->second;
  }

  [[nodiscard]] std::size_t size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
  }

 private:
  struct Key {
    Partition kappa;
    int max_parts;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept { return PartitionHash{}(k.kappa) * 31u + static_cast<std::size_t>(k.max_parts); }
  };

  static ZonalExpansion build(const Partition& kappa, int max_parts) {
    ZonalExpansion e{kappa, max_parts, {}};
    if (kappa.length() > max_parts) return e;  // vanishes on max_parts variables
    if (kappa.empty()) {
      e.terms.push_back({kappa, 1.0, Rational(1)});
      return e;
    }
    const int p = kappa.length();
    if (kappa.weight() <= kExactWeightLimit) {
      auto raw = detail::james_recursion<Rational>(kappa, max_parts);
      Rational at_unit = 0;
      for (const auto& [l, c] : raw)
        if (l.length() <= p) at_unit += c * detail::monomial_unit_count(l, p);
      const Rational scale = detail::zonal_unit_exact(kappa, p) / at_unit;
      for (auto& [l, c] : raw) {
        Rational v = c * scale;
        e.terms.push_back({l, static_cast<double>(v), std::move(v)});
      }
    } else {
      auto raw = detail::james_recursion<double>(kappa, max_parts);
      double at_unit = 0;
      for (const auto& [l, c] : raw)
        if (l.length() <= p) at_unit += c * static_cast<double>(detail::monomial_unit_count(l, p));
      const double scale = zonal_unit(kappa, p) / at_unit;
      for (auto& [l, c] : raw) e.terms.push_back({l, c * scale, std::nullopt});
    }
    return e;
  }

  mutable std::shared_mutex mutex_;
  int max_degree_;
  std::unordered_map<Key, std::shared_ptr<const ZonalExpansion>, KeyHash> entries_;
};

/// Coefficients of C_kappa in the monomial basis (all monomials unless
/// max_parts restricts them). Exact rationals up to weight 20.
inline std::shared_ptr<const ZonalExpansion> zonal_expansion(const Partition& kappa, int max_parts = -1,
                                                            ZonalCache& cache = ZonalCache::global()) {
  return cache.get(kappa, max_parts < 0 ? kappa.weight() : max_parts);
}

/// C_kappa evaluated at the eigenvalues x of a symmetric matrix, through the
/// monomial expansion. Zero when kappa has more parts than x has entries.
inline double zonal_eval(const Partition& kappa, std::span<const double> x, ZonalCache& cache = ZonalCache::global()) {
  if (kappa.length() > static_cast<int>(x.size())) return 0.0;
  const auto e = cache.get(kappa, static_cast<int>(x.size()));
  double s = 0.0;
  for (const auto& t : e->terms) s += t.coefficient * monomial_symmetric(t.lambda, x);
  return s;
}

}  // namespace wisheig
