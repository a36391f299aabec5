#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numeric>
#include <random>

#include "wisheig/montecarlo/engine.hpp"
#include "wisheig/scalardist.hpp"

using namespace wisheig;

TEST(Philox, KnownAnswerVectors) {
  using C = Philox4x32::Counter;
  EXPECT_EQ(Philox4x32::block({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
            (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
            (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(ReplicationStream, DeterministicAndDistinct) {
  ReplicationStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    EXPECT_NE(x, c.next_u64());
    EXPECT_NE(x, d.next_u64());
  }
}

TEST(ReplicationStream, NormalMoments) {
  ReplicationStream rng(1, 0);
  const int n = 200000;
  std::vector<double> z(n);
  for (auto& v : z) v = rng.normal();
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
  double var = 0.0;
  for (double v : z) var += (v - mean) * (v - mean);
  var /= n - 1;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / n));
  const double ks = ks_distance(EmpiricalDistribution(z), [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); });
  EXPECT_LT(ks, 1.63 / std::sqrt(n));
}

TEST(Jacobi, MatchesEigenSolver) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z;
  for (int n : {1, 2, 3, 7, 15}) {
    Eigen::MatrixXd x(n + 4, n);
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < n; ++j) x(i, j) = z(rng);
    const Eigen::MatrixXd g = x.transpose() * x;
    std::vector<double> a(g.data(), g.data() + n * n), ev(static_cast<std::size_t>(n));
    jacobi_eigenvalues(a, n, ev);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(g);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], ref.eigenvalues()(n - 1 - i), 1e-10 * g.norm());
  }
}

TEST(Jacobi, DiagonalAndIndefinite) {
  std::vector<double> a{3, 0, 0, 0, -1, 0, 0, 0, 2}, ev(3);
  jacobi_eigenvalues(a, 3, ev);
  EXPECT_EQ(ev, (std::vector<double>{3, 2, -1}));
  std::vector<double> b{0, 1, 1, 0}, ev2(2);
  jacobi_eigenvalues(b, 2, ev2);
  EXPECT_NEAR(ev2[0], 1.0, 1e-15);
  EXPECT_NEAR(ev2[1], -1.0, 1e-15);
}

TEST(SampleEigenvalues, DeterministicSortedPositive) {
  const CovarianceSpec cov(SpikedCovParams{200, 3, 20});
  const auto a = sample_eigenvalues(20, 5, cov, 11, 3);
  const auto b = sample_eigenvalues(20, 5, cov, 11, 3);
  EXPECT_EQ(a.ells, b.ells);
  ASSERT_EQ(a.n(), 5);
  EXPECT_NO_THROW(a.validate());
  EXPECT_NE(a.ells, sample_eigenvalues(20, 5, cov, 11, 4).ells);
  EXPECT_THROW(sample_eigenvalues(5, 5, CovarianceSpec::identity(5), 1, 0), domain_error);
  EXPECT_THROW(sample_eigenvalues(6, 5, CovarianceSpec::identity(5), 1, 0), domain_error);
}

TEST(SampleEigenvalues, SpikedMeanOfLeadingRatio) {
  // l_1 / lambda_1 is close to chi-square with n dof under strong spiking.
  SimConfig cfg{.m = 50, .n = 10, .cov = CovarianceSpec(SpikedCovParams{200, 3, 50}), .reps = 100000};
  const double lambda1 = cfg.cov[0];
  const auto d = run_simulation(cfg, [&](const EigenSample& s) { return s.ells[0] / lambda1; });
  const auto& v = d.sorted_values();
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  EXPECT_NEAR(mean, 10.0, 3 * se + 1e-3);
}

TEST(RunSimulation, SingleReplication) {
  SimConfig cfg{.m = 4, .n = 2, .cov = CovarianceSpec::identity(4), .reps = 1};
  const auto d = run_simulation(cfg, [](const EigenSample& s) { return s.ells[0]; });
  EXPECT_EQ(d.count(), 1u);
}

TEST(RunSimulation, IdenticalAcrossWorkerCounts) {
  SimConfig cfg{.m = 12, .n = 4, .cov = CovarianceSpec(SpikedCovParams{50, 3, 12}), .reps = 5003, .seed = 77};
  std::vector<Statistic> stats{[](const EigenSample& s) { return s.ells[0]; },
                               [](const EigenSample& s) { return s.ells[1]; }};
  cfg.workers = 1;
  const auto one = run_simulation(cfg, stats);
  cfg.workers = 4;
  const auto four = run_simulation(cfg, stats);
  for (std::size_t i = 0; i < stats.size(); ++i) EXPECT_EQ(one[i].sorted_values(), four[i].sorted_values());
}

TEST(RunSimulation, EqualEigenvalueOrderIsIrrelevant) {
  SimConfig a{.m = 6, .n = 2, .cov = CovarianceSpec({3.0, 1.0, 1.0, 1.0, 1.0, 1.0}), .reps = 500};
  SimConfig b = a;
  b.cov = CovarianceSpec({1.0, 1.0, 3.0, 1.0, 1.0, 1.0});
  const Statistic l1 = [](const EigenSample& s) { return s.ells[0]; };
  EXPECT_EQ(run_simulation(a, l1).sorted_values(), run_simulation(b, l1).sorted_values());
}

TEST(RunSimulation, ChiSquareLawForOneColumn) {
  SimConfig cfg{.m = 6, .n = 1, .cov = CovarianceSpec::identity(6, 2.5), .reps = 100000, .seed = 9};
  const auto d = run_simulation(cfg, [](const EigenSample& s) { return s.ells[0] / 2.5; });
  EXPECT_LE(ks_distance(d, [](double x) { return chisq_cdf(x, ChiSquare(6)); }), 0.01);
}

TEST(RunSimulation, ChiSquareUpperQuantile) {
  SimConfig cfg{.m = 10, .n = 1, .cov = CovarianceSpec::identity(10), .reps = 1000000, .seed = 21};
  const auto d = run_simulation(cfg, [](const EigenSample& s) { return s.ells[0]; });
  EXPECT_NEAR(empirical_quantile(d, 0.99), 23.21, 0.15);
}

TEST(RunSimulation, TwoPopulations) {
  SimConfig a{.m = 5, .n = 2, .cov = CovarianceSpec::identity(5), .reps = 2000, .seed = 3};
  SimConfig b{.m = 5, .n = 3, .cov = CovarianceSpec::identity(5, 4.0)};
  const auto out = run_two_population(a, b, {[](const EigenSample& x, const EigenSample& y) {
                                        EXPECT_EQ(x.n(), 2);
                                        EXPECT_EQ(y.n(), 3);
                                        return x.ells[0] / y.ells[0];
                                      }});
  EXPECT_EQ(out.front().count(), 2000u);
  a.workers = 3;
  const auto again = run_two_population(a, b, {[](const EigenSample& x, const EigenSample& y) { return x.ells[0] / y.ells[0]; }});
  EXPECT_EQ(out.front().sorted_values(), again.front().sorted_values());
}

TEST(RunSimulation, Errors) {
  SimConfig cfg{.m = 4, .n = 2, .cov = CovarianceSpec::identity(4), .reps = 0};
  const Statistic l1 = [](const EigenSample& s) { return s.ells[0]; };
  EXPECT_THROW(run_simulation(cfg, l1), domain_error);
  cfg.reps = 1;
  cfg.cov = CovarianceSpec::identity(5);
  EXPECT_THROW(run_simulation(cfg, l1), domain_error);
  SimConfig huge{.m = 500, .n = 100, .cov = CovarianceSpec::identity(500), .reps = 1000000000};
  EXPECT_THROW(run_simulation(huge, l1), resource_error);
  SimConfig wide{.m = 4, .n = 2, .cov = CovarianceSpec::identity(4), .reps = 400000000};
  EXPECT_THROW(run_simulation(wide, l1), resource_error);
  cfg.cov = CovarianceSpec::identity(4);
  EXPECT_THROW(run_simulation(cfg, [](const EigenSample&) -> double { throw index_error("boom"); }), index_error);
}

TEST(EmpiricalDistribution, Quantiles) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  const EmpiricalDistribution d(v);
  EXPECT_DOUBLE_EQ(empirical_quantile(d, 0.5), 50.5);
  const double q = empirical_quantile(d, 0.999 / 99.0);
  EXPECT_GE(q, 1.0);
  EXPECT_LE(q, 2.0);
  EXPECT_THROW(empirical_quantile(d, 0.0), domain_error);
  EXPECT_THROW(empirical_quantile(d, 1.0), domain_error);
  EXPECT_THROW(empirical_quantile(EmpiricalDistribution({1.0}), 0.5), domain_error);
  EXPECT_TRUE(std::is_sorted(d.sorted_values().begin(), d.sorted_values().end()));
}

TEST(EmpiricalDistribution, Cdf) {
  const EmpiricalDistribution d({3.0, 1.0, 2.0, 2.0});
  EXPECT_EQ(empirical_cdf_at(d, 0.5), 0.0);
  EXPECT_EQ(empirical_cdf_at(d, 2.0), 0.75);
  EXPECT_EQ(empirical_cdf_at(d, 10.0), 1.0);
}

TEST(KsDistance, Examples) {
  const auto unif = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_DOUBLE_EQ(ks_distance(EmpiricalDistribution({0.5}), unif), 0.5);
  EXPECT_GT(ks_distance(EmpiricalDistribution({100.0, 101.0, 102.0, 103.0}), unif), 0.999);

  ReplicationStream rng(2, 0);
  std::vector<double> u(100000);
  for (auto& x : u) x = rng.uniform();
  EXPECT_LE(ks_distance(EmpiricalDistribution(u), unif), 0.006);
}

TEST(SquaredSingularValues, MatchesEigenSolver) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> z;
  for (int n : {1, 2, 3, 7, 15}) {
    const int m = n + 5;
    Eigen::MatrixXd x(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) x(i, j) = z(rng);
    const Eigen::MatrixXd g = x.transpose() * x;
    std::vector<double> a(x.data(), x.data() + m * n), ev(static_cast<std::size_t>(n));
    squared_singular_values(a, m, n, ev);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(g);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(ev[static_cast<std::size_t>(i)], ref.eigenvalues()(n - 1 - i), 1e-12 * g.norm());
  }
}

// Rows scaled over 18 orders of magnitude. Eigen's SVD of the unscaled-row
// problem in long double is the reference; the Gram route would leave the
// smallest eigenvalue with no correct digits.
TEST(SquaredSingularValues, GradedRowsKeepRelativeAccuracy) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> z;
  const std::vector<double> scale{1, 1e-3, 1e-6, 1e-9, 1e-9, 1e-9};
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> xl(6, 3);
    Eigen::MatrixXd x(6, 3);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 3; ++j) {
        x(i, j) = scale[static_cast<std::size_t>(i)] * z(rng);
        xl(i, j) = x(i, j);
      }
    Eigen::JacobiSVD<decltype(xl)> svd(xl);
    std::vector<double> a(x.data(), x.data() + 18), ev(3);
    squared_singular_values(a, 6, 3, ev);
    for (int i = 0; i < 3; ++i) {
      const auto ref = static_cast<double>(svd.singularValues()(i) * svd.singularValues()(i));
      EXPECT_NEAR(ev[static_cast<std::size_t>(i)] / ref, 1.0, 1e-10);
    }
  }
}
