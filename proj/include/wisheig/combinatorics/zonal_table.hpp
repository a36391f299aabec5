#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "wisheig/combinatorics/partition.hpp"
#include "wisheig/error.hpp"

namespace wisheig {

/// C_kappa(x) / k! for every partition kappa of weight k <= degree() with at
/// most x.size() parts, evaluated together at one argument x.
///
/// Uses the branching rule of Jack polynomials (alpha = 2) in the
/// P-normalisation,
///   P_kappa(x_1..x_v) = sum_mu P_mu(x_1..x_{v-1}) psi_{kappa/mu} x_v^{|kappa/mu|},
/// where kappa/mu runs over horizontal strips and psi is the product of
/// b_mu(s)/b_kappa(s) over cells s in rows meeting the strip but in columns
/// that do not, b(s) = (alpha*arm + leg + 1) / (alpha*(arm + 1) + leg).
/// Then C_kappa(x)/k! = alpha^k P_kappa(x) / prod_s (alpha*(arm + 1) + leg).
///
/// Entries are built degree by degree, so extending the table only computes
/// the new degrees.
class ZonalTable {
 public:
  static constexpr int kMaxDegree = 255;
  static constexpr int kMaxStoredParts = 32;
  static constexpr double kAlpha = 2.0;

  explicit ZonalTable(std::span<const double> x) : x_(x.begin(), x.end()), by_vars_(x.size()) {
    if (x_.empty()) throw domain_error("ZonalTable: empty argument");
    // Degree zero.
    for (auto& level : by_vars_) level.emplace(Key{}, 1.0L);
    degrees_.push_back({Entry{{}, 1.0L}});
  }

  struct Entry {
    std::vector<int> parts;
    long double value;  // C_kappa(x) / k!
  };

  [[nodiscard]] int degree() const noexcept { return static_cast<int>(degrees_.size()) - 1; }
  [[nodiscard]] int variables() const noexcept { return static_cast<int>(x_.size()); }
  [[nodiscard]] std::span<const double> argument() const noexcept { return x_; }

  void extend_to(int k) {
    if (k > kMaxDegree) throw resource_error("ZonalTable: degree exceeds 255");
    while (degree() < k) add_degree(degree() + 1);
  }

  /// Entries of weight k, reverse-lexicographic.
  [[nodiscard]] const std::vector<Entry>& entries(int k) const {
    if (k < 0 || k > degree()) throw index_error("ZonalTable: degree not computed");
    return degrees_[static_cast<std::size_t>(k)];
  }

 private:
  using Key = std::array<std::uint64_t, 4>;  // one byte per part
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      std::uint64_t h = 0xcbf29ce484222325ULL;
      for (auto w : k) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      }
      return static_cast<std::size_t>(h);
    }
  };
  static void set_part(Key& key, std::size_t i, int part) {
    const std::size_t word = i / 8, shift = (i % 8) * 8;
    key[word] = (key[word] & ~(0xffULL << shift)) | (static_cast<std::uint64_t>(part) << shift);
  }
  static Key pack(const std::vector<int>& parts) {
    Key k{};
    for (std::size_t i = 0; i < parts.size(); ++i) set_part(k, i, parts[i]);
    return k;
  }

  static double b(int arm, int leg) { return (kAlpha * arm + leg + 1.0) / (kAlpha * (arm + 1) + leg); }

  // prod_{a < n} b(a, 0)
  double row_prefix(int n) {
    while (static_cast<int>(row_prefix_.size()) <= n) {
      const int a = static_cast<int>(row_prefix_.size()) - 1;
      row_prefix_.push_back(row_prefix_.back() * b(a, 0));
    }
    return row_prefix_[static_cast<std::size_t>(n)];
  }

  static long double upper_hook_product(const std::vector<int>& parts) {
    if (parts.empty()) return 1.0L;
    std::vector<int> conj(static_cast<std::size_t>(parts.front()), 0);
    for (int p : parts)
      for (int j = 0; j < p; ++j) ++conj[static_cast<std::size_t>(j)];
    long double r = 1.0L;
    for (std::size_t i = 0; i < parts.size(); ++i)
      for (int j = 0; j < parts[i]; ++j) {
        const int arm = parts[i] - j - 1;
        const int leg = conj[static_cast<std::size_t>(j)] - static_cast<int>(i) - 1;
        r *= kAlpha * (arm + 1) + leg;
      }
    return r;
  }

  void add_degree(int k) {
    const int n = variables();
    if (std::min(n, k) > kMaxStoredParts) throw resource_error("ZonalTable: too many parts to index");
    std::vector<long double> pow_y(static_cast<std::size_t>(k) + 1);

    for (int v = 1; v <= n; ++v) {
      const long double y = kAlpha * x_[static_cast<std::size_t>(v - 1)];
      pow_y[0] = 1.0L;
      for (int d = 1; d <= k; ++d) pow_y[static_cast<std::size_t>(d)] = pow_y[static_cast<std::size_t>(d - 1)] * y;

      auto& level = by_vars_[static_cast<std::size_t>(v - 1)];
      for_each_partition(k, std::min(v, k), [&](const std::vector<int>& kappa) {
        long double val;
        if (v == 1) {
          val = pow_y[static_cast<std::size_t>(k)];
        } else {
          val = branch(kappa, v, pow_y, by_vars_[static_cast<std::size_t>(v - 2)]);
        }
        level.emplace(pack(kappa), val);
      });
    }

    std::vector<Entry> out;
    const auto& top = by_vars_[static_cast<std::size_t>(n - 1)];
    for_each_partition(k, std::min(n, k), [&](const std::vector<int>& kappa) {
      out.push_back({kappa, top.at(pack(kappa)) / upper_hook_product(kappa)});
    });
    degrees_.push_back(std::move(out));
  }

  // sum over mu with kappa/mu a horizontal strip and length(mu) <= v-1.
  long double branch(const std::vector<int>& kappa_in, int v, const std::vector<long double>& pow_y,
                     const std::unordered_map<Key, long double, KeyHash>& prev) {
    std::vector<int> kap(static_cast<std::size_t>(v) + 1, 0);
    std::copy(kappa_in.begin(), kappa_in.end(), kap.begin());
    const int k = std::accumulate(kappa_in.begin(), kappa_in.end(), 0);
    std::vector<int> mu(static_cast<std::size_t>(v), 0);
    Key key{};
    long double total = 0.0L;

    auto rec = [&](auto&& self, int r, int mu_weight, long double psi) -> void {
      if (r == v - 1) {
        if (auto it = prev.find(key); it != prev.end())
          total += it->second * pow_y[static_cast<std::size_t>(k - mu_weight)] * psi;
        return;
      }
      const int lo = kap[static_cast<std::size_t>(r) + 1];
      const int hi = kap[static_cast<std::size_t>(r)];
      long double above = 1.0L;  // rows i < r over columns (lo, mu_r]
      for (int m = lo; m <= hi; ++m) {
        if (m > lo) {
          for (int i = 0; i < r; ++i) {
            const int ki = kap[static_cast<std::size_t>(i)], mi = mu[static_cast<std::size_t>(i)];
            if (ki == mi) continue;
            const int leg = r - i;
            above *= b(mi - m, leg) / b(ki - m, leg);
          }
        }
        long double own = 1.0L;
        if (m < hi) own = row_prefix(m - lo) * row_prefix(hi - m) / row_prefix(hi - lo);
        mu[static_cast<std::size_t>(r)] = m;
        set_part(key, static_cast<std::size_t>(r), m);
        self(self, r + 1, mu_weight + m, psi * above * own);
      }
      mu[static_cast<std::size_t>(r)] = 0;
      set_part(key, static_cast<std::size_t>(r), 0);
    };
    rec(rec, 0, 0, 1.0L);
    return total;
  }

  std::vector<double> x_;
  std::vector<std::unordered_map<Key, long double, KeyHash>> by_vars_;
  std::vector<std::vector<Entry>> degrees_;
  std::vector<double> row_prefix_{1.0};
};

}  // namespace wisheig
