#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "wisheig/combinatorics/partition.hpp"
#include "wisheig/combinatorics/pochhammer.hpp"
#include "wisheig/combinatorics/zonal.hpp"
#include "wisheig/combinatorics/zonal_table.hpp"

using namespace wisheig;

namespace {

double weight_sum(int k, std::span<const double> x) {
  double s = 0.0;
  for (const auto& kappa : enumerate_partitions(k, static_cast<int>(x.size()))) s += zonal_eval(kappa, x);
  return s;
}

std::vector<double> random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST(Partition, StripsZerosAndValidates) {
  EXPECT_EQ(Partition({2, 1, 0}), Partition({2, 1}));
  EXPECT_EQ(Partition({3, 1}).weight(), 4);
  EXPECT_EQ(Partition({3, 1}).length(), 2);
  EXPECT_THROW(Partition({1, 2}), domain_error);
  EXPECT_THROW(Partition({2, -1}), domain_error);
  EXPECT_EQ(Partition({3, 1}).conjugate(), Partition({2, 1, 1}));
  EXPECT_TRUE(Partition({2, 2}).dominated_by(Partition({3, 1})));
  EXPECT_FALSE(Partition({3, 1}).dominated_by(Partition({2, 2})));
}

TEST(EnumeratePartitions, Examples) {
  auto p0 = enumerate_partitions(0, 3);
  ASSERT_EQ(p0.size(), 1u);
  EXPECT_TRUE(p0[0].empty());

  auto p3 = enumerate_partitions(3, 2);
  ASSERT_EQ(p3.size(), 2u);
  EXPECT_EQ(p3[0], Partition({3}));
  EXPECT_EQ(p3[1], Partition({2, 1}));

  auto p4 = enumerate_partitions(4, 4);
  std::vector<Partition> want{{4}, {3, 1}, {2, 2}, {2, 1, 1}, {1, 1, 1, 1}};
  EXPECT_EQ(p4, want);
}

TEST(EnumeratePartitions, CountsAndOrder) {
  // p(n) for n = 0..12
  const int p[] = {1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77};
  for (int k = 0; k <= 12; ++k) {
    auto all = enumerate_partitions(k, std::max(k, 1));
    EXPECT_EQ(static_cast<int>(all.size()), p[k]);
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
    for (const auto& kappa : all) EXPECT_EQ(kappa.weight(), k);
  }
  EXPECT_THROW(enumerate_partitions(-1, 2), domain_error);
  EXPECT_THROW(enumerate_partitions(3, 0), domain_error);
}

TEST(Pochhammer, Examples) {
  EXPECT_DOUBLE_EQ(pochhammer_partition(2.5, Partition{}), 1.0);
  const double a = 1.7;
  EXPECT_DOUBLE_EQ(pochhammer_partition(a, Partition({2})), a * (a + 1));
  EXPECT_DOUBLE_EQ(pochhammer_partition(a, Partition({1, 1})), a * (a - 0.5));
  EXPECT_DOUBLE_EQ(pochhammer_partition(0.5, Partition({1, 1})), 0.0);
}

TEST(Pochhammer, AllOnesColumn) {
  for (double a : {-1.25, 0.3, 2.0, 7.5}) {
    for (int r = 1; r <= 6; ++r) {
      double want = 1.0;
      for (int i = 1; i <= r; ++i) want *= a - (i - 1) / 2.0;
      EXPECT_NEAR(pochhammer_partition(a, Partition(std::vector<int>(static_cast<std::size_t>(r), 1))), want,
                  1e-12 * std::max(1.0, std::fabs(want)));
    }
  }
}

TEST(Pochhammer, TableMatchesDirect) {
  detail::PochhammerTable table(-0.5, 4, 6);
  for (const auto& kappa : enumerate_partitions(6, 4)) {
    const double direct = pochhammer_partition(-0.5, kappa);
    EXPECT_NEAR(table.of(kappa.parts()).value(), direct, 1e-12 * std::max(1.0, std::fabs(direct))) << kappa;
  }
}

TEST(MultivariateGamma, Examples) {
  EXPECT_NEAR(log_multivariate_gamma(1, 2.0), 0.0, 1e-15);
  EXPECT_NEAR(log_multivariate_gamma(2, 1.5), std::log(std::numbers::pi / 2), 1e-14);
  const double naive = std::pow(std::numbers::pi, 1.5) * std::tgamma(2.5) * std::tgamma(2.0) * std::tgamma(1.5);
  EXPECT_NEAR(log_multivariate_gamma(3, 2.5), std::log(naive), 1e-13);
  EXPECT_THROW(log_multivariate_gamma(3, 1.0), domain_error);
  EXPECT_THROW(log_multivariate_gamma(0, 1.0), domain_error);
}

TEST(MultivariateGamma, ReducesToLogGamma) {
  for (double a = 0.5; a <= 50.0; a += 0.37) EXPECT_NEAR(log_multivariate_gamma(1, a), std::lgamma(a), 1e-12);
  // large arguments stay finite
  EXPECT_TRUE(std::isfinite(log_multivariate_gamma(10, 500.0)));
}

TEST(ZonalExpansion, DegreeOne) {
  auto e = zonal_expansion(Partition({1}));
  ASSERT_EQ(e->terms.size(), 1u);
  EXPECT_EQ(e->terms[0].lambda, Partition({1}));
  EXPECT_EQ(*e->terms[0].exact, Rational(1));
}

TEST(ZonalExpansion, DegreeTwoExact) {
  auto e = zonal_expansion(Partition({2}));
  ASSERT_TRUE(e->is_exact());
  ASSERT_EQ(e->terms.size(), 2u);
  EXPECT_EQ(*e->terms[0].exact, Rational(1));
  EXPECT_EQ(*e->terms[1].exact, Rational(2, 3));
  auto f = zonal_expansion(Partition({1, 1}));
  ASSERT_EQ(f->terms.size(), 1u);
  EXPECT_EQ(*f->terms[0].exact, Rational(4, 3));

  const std::vector<double> ones{1.0, 1.0};
  EXPECT_NEAR(zonal_eval(Partition({2}), ones), 8.0 / 3.0, 1e-15);
  EXPECT_NEAR(zonal_eval(Partition({1, 1}), ones), 4.0 / 3.0, 1e-15);
  const std::vector<double> d12{1.0, 2.0};
  EXPECT_NEAR(zonal_eval(Partition({2}), d12) + zonal_eval(Partition({1, 1}), d12), 9.0, 1e-13);
}

TEST(ZonalExpansion, ExactSumOfCoefficientsOnSingletons) {
  // The coefficient of M_(1^k) summed over kappa equals k! (normalisation).
  for (int k = 1; k <= 8; ++k) {
    Rational s = 0;
    const Partition ones(std::vector<int>(static_cast<std::size_t>(k), 1));
    for (const auto& kappa : enumerate_partitions(k, k))
      for (const auto& t : zonal_expansion(kappa)->terms)
        if (t.lambda == ones) s += *t.exact;
    EXPECT_EQ(s, detail::factorial_q(k)) << "k=" << k;
  }
}

TEST(ZonalExpansion, MaxDegreeIsEnforced) {
  ZonalCache small(4);
  EXPECT_NO_THROW(small.get(Partition({4}), 4));
  EXPECT_THROW(small.get(Partition({5}), 5), resource_error);
}

TEST(ZonalExpansion, FloatFallbackAboveExactLimit) {
  ZonalCache cache(30);
  auto e = cache.get(Partition({21}), 2);
  EXPECT_FALSE(e->is_exact());
  const std::vector<double> x{0.6, 0.4};
  double s = 0.0;
  for (const auto& kappa : enumerate_partitions(21, 2)) {
    double v = 0.0;
    for (const auto& t : cache.get(kappa, 2)->terms) v += t.coefficient * monomial_symmetric(t.lambda, x);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-9);
}

TEST(ZonalEval, Examples) {
  const std::vector<double> x{1.0, 2.0};
  EXPECT_NEAR(zonal_eval(Partition({1}), x), 3.0, 1e-15);
  const std::vector<double> one{0.7};
  EXPECT_EQ(zonal_eval(Partition({2, 1}), one), 0.0);
  const std::vector<double> half{0.5, 0.5};
  EXPECT_NEAR(weight_sum(3, half), 1.0, 1e-14);
}

TEST(ZonalUnit, Examples) {
  EXPECT_DOUBLE_EQ(zonal_unit(Partition{}, 5), 1.0);
  EXPECT_NEAR(zonal_unit(Partition({1}), 4), 4.0, 1e-13);
  EXPECT_NEAR(zonal_unit(Partition({2}), 2), 8.0 / 3.0, 1e-13);
  EXPECT_EQ(zonal_unit(Partition({1, 1, 1}), 2), 0.0);
}

TEST(ZonalUnit, MatchesEvaluationAtOnes) {
  for (int m = 1; m <= 5; ++m) {
    const std::vector<double> ones(static_cast<std::size_t>(m), 1.0);
    for (int k = 0; k <= 7; ++k)
      for (const auto& kappa : enumerate_partitions(k, m)) {
        const double u = zonal_unit(kappa, m);
        EXPECT_NEAR(zonal_eval(kappa, ones), u, 1e-11 * u) << kappa << " m=" << m;
        EXPECT_NEAR(static_cast<double>(detail::zonal_unit_exact(kappa, m)), u, 1e-12 * u);
      }
  }
}

TEST(ZonalEval, Normalization) {
  std::mt19937_64 rng(7);
  for (int m = 1; m <= 5; ++m)
    for (int trial = 0; trial < 3; ++trial) {
      auto x = random_vector(rng, m, -1.0, 2.0);
      const double tr = std::accumulate(x.begin(), x.end(), 0.0);
      for (int k = 0; k <= 8; ++k) {
        const double want = std::pow(tr, k);
        EXPECT_NEAR(weight_sum(k, x), want, 1e-9 * std::max(1.0, std::fabs(want))) << "m=" << m << " k=" << k;
      }
    }
}

TEST(ZonalEval, SymmetricAndHomogeneous) {
  std::mt19937_64 rng(11);
  auto x = random_vector(rng, 4, 0.1, 1.5);
  for (int k = 1; k <= 6; ++k)
    for (const auto& kappa : enumerate_partitions(k, 4)) {
      const double base = zonal_eval(kappa, x);
      auto perm = x;
      std::reverse(perm.begin(), perm.end());
      std::swap(perm[0], perm[1]);
      EXPECT_NEAR(zonal_eval(kappa, perm), base, 1e-12 * std::fabs(base));
      auto scaled = x;
      for (auto& v : scaled) v *= 1.7;
      EXPECT_NEAR(zonal_eval(kappa, scaled), std::pow(1.7, k) * base, 1e-11 * std::fabs(base) * std::pow(1.7, k));
    }
}

TEST(ZonalTable, AgreesWithMonomialExpansion) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 5; ++n) {
    auto x = random_vector(rng, n, -0.8, 1.2);
    ZonalTable table(x);
    table.extend_to(8);
    for (int k = 0; k <= 8; ++k) {
      const auto& entries = table.entries(k);
      EXPECT_EQ(entries.size(), enumerate_partitions(k, n).size());
      for (const auto& e : entries) {
        const Partition kappa(e.parts);
        const double want = zonal_eval(kappa, x) / std::tgamma(k + 1.0);
        EXPECT_NEAR(static_cast<double>(e.value), want, 1e-12 * std::max(1e-3, std::fabs(want))) << kappa << " n=" << n;
      }
    }
  }
}

TEST(ZonalTable, ExtendsIncrementally) {
  const std::vector<double> x{0.3, 0.2, 0.1};
  ZonalTable a(x), b(x);
  a.extend_to(5);
  a.extend_to(12);
  b.extend_to(12);
  for (int k = 0; k <= 12; ++k) {
    ASSERT_EQ(a.entries(k).size(), b.entries(k).size());
    for (std::size_t i = 0; i < a.entries(k).size(); ++i) EXPECT_EQ(a.entries(k)[i].value, b.entries(k)[i].value);
  }
  EXPECT_THROW((void)a.entries(13), index_error);
  EXPECT_THROW(a.extend_to(300), resource_error);
}

TEST(ZonalCache, ConcurrentReadersSeeOneValue) {
  ZonalCache cache;
  std::vector<std::shared_ptr<const ZonalExpansion>> got(8);
  std::vector<std::thread> threads;
  for (std::size_t i = 0; i < got.size(); ++i)
    threads.emplace_back([&, i] { got[i] = cache.get(Partition({4, 2, 1}), 7); });
  for (auto& t : threads) t.join();
  for (const auto& g : got) {
    ASSERT_EQ(g->terms.size(), got[0]->terms.size());
    for (std::size_t j = 0; j < g->terms.size(); ++j) EXPECT_EQ(g->terms[j].coefficient, got[0]->terms[j].coefficient);
  }
  EXPECT_EQ(cache.size(), 1u);
}
