#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "wisheig/error.hpp"

namespace wisheig {

/// Weakly decreasing sequence of positive integers. Trailing zeros are
/// stripped on construction, so `Partition{2, 1, 0}` equals `Partition{2, 1}`.
class Partition {
 public:
  Partition() = default;
  Partition(std::initializer_list<int> parts) : Partition(std::vector<int>(parts)) {}
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    while (!parts_.empty() && parts_.back() == 0) parts_.pop_back();
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw domain_error("Partition: parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1]) throw domain_error("Partition: parts must be weakly decreasing");
    }
    weight_ = std::accumulate(parts_.begin(), parts_.end(), 0);
  }

  [[nodiscard]] int weight() const noexcept { return weight_; }
  [[nodiscard]] int length() const noexcept { return static_cast<int>(parts_.size()); }
  [[nodiscard]] bool empty() const noexcept { return parts_.empty(); }
  [[nodiscard]] const std::vector<int>& parts() const noexcept { return parts_; }

  // Zero beyond the stored length.
  [[nodiscard]] int operator[](std::size_t i) const noexcept { return i < parts_.size() ? parts_[i] : 0; }

  [[nodiscard]] Partition conjugate() const {
    std::vector<int> c(parts_.empty() ? 0 : static_cast<std::size_t>(parts_.front()), 0);
    for (int p : parts_)
      for (int j = 0; j < p; ++j) ++c[static_cast<std::size_t>(j)];
    return Partition(std::move(c));
  }

  // Dominance order: *this <= other iff partial sums never exceed other's.
  [[nodiscard]] bool dominated_by(const Partition& other) const noexcept {
    if (weight_ != other.weight_) return false;
    int a = 0, b = 0;
    const std::size_t n = std::max(parts_.size(), other.parts_.size());
    for (std::size_t i = 0; i < n; ++i) {
      a += (*this)[i];
      b += other[i];
      if (a > b) return false;
    }
    return true;
  }

  friend bool operator==(const Partition&, const Partition&) = default;
  // Reverse-lexicographic: (3) before (2,1) before (1,1,1).
  friend bool operator<(const Partition& a, const Partition& b) {
    return std::lexicographical_compare(b.parts_.begin(), b.parts_.end(), a.parts_.begin(), a.parts_.end());
  }

  [[nodiscard]] std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(parts_[i]);
    }
    return s + ")";
  }

  friend std::ostream& operator<<(std::ostream& os, const Partition& p) { return os << p.str(); }

 private:
  std::vector<int> parts_;
  int weight_ = 0;
};

struct PartitionHash {
  std::size_t operator()(const Partition& p) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (int x : p.parts()) h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

namespace detail {

template <class Visit>
void visit_partitions(int remaining, int max_part, int slots, std::vector<int>& cur, Visit& visit) {
  if (remaining == 0) {
    visit(cur);
    return;
  }
  if (slots == 0) return;
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    // The remaining slots cannot absorb more than slots * p.
    if (static_cast<long long>(p) * slots < remaining) break;
    cur.push_back(p);
    visit_partitions(remaining - p, p, slots - 1, cur, visit);
    cur.pop_back();
  }
}

}  // namespace detail

/// Calls visit(parts) for every partition of k with at most max_length parts,
/// in reverse-lexicographic order, without materialising Partition objects.
template <class Visit>
void for_each_partition(int k, int max_length, Visit&& visit) {
  std::vector<int> cur;
  cur.reserve(static_cast<std::size_t>(std::max(max_length, 0)));
  detail::visit_partitions(k, k, max_length, cur, visit);
}

/// Every partition of k with at most max_length parts, reverse-lexicographic.
/// k = 0 yields the single empty partition.
inline std::vector<Partition> enumerate_partitions(int k, int max_length) {
  if (k < 0) throw domain_error("enumerate_partitions: k must be non-negative");
  if (max_length < 1) throw domain_error("enumerate_partitions: max_length must be at least 1");
  std::vector<Partition> out;
  for_each_partition(k, max_length, [&](const std::vector<int>& parts) { out.emplace_back(parts); });
  return out;
}

}  // namespace wisheig

template <>
struct std::hash<wisheig::Partition> : wisheig::PartitionHash {};
