#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wisheig/cli/report.hpp"
#include "wisheig/eigdist.hpp"
#include "wisheig/montecarlo/engine.hpp"
#include "wisheig/scalardist.hpp"

namespace wisheig::cli {

// Bad flags or inputs the user can fix; exit status 2.
class usage_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

inline constexpr double kCase1A = 200.0, kCase2A = 50.0, kCaseB = 3.0;

/// Flag values for every command. `given` holds the long names of the flags
/// set explicitly, which decides between (a, b) and --lambdas and lets
/// commands fill in their own defaults.
struct Options {
  int m = 50;
  int n = 10;
  int n1 = 10;
  int n2 = 10;
  double a = kCase1A;
  double b = kCaseB;
  std::vector<double> lambdas;
  std::vector<double> lambdas2;
  std::int64_t reps = 1000000;
  std::uint64_t seed = kDefaultSeed;
  int workers = 1;
  int trunc_k = 60;
  double tail_tol = 1e-12;
  double alpha = 0.05;
  std::string variant = to_string(kDefaultRatioVariant);
  std::string format = "csv";
  bool timing = false;

  std::vector<double> x;
  std::vector<double> q;
  std::string q_grid;
  std::vector<std::string> statistics{"scaled:1"};
  std::vector<double> probs{0.01, 0.05, 0.1, 0.5, 0.9, 0.95, 0.99};
  double ell1 = 0.0, ell2 = 0.0;
  std::string data1, data2;
  int k = 1;
  std::string overlay;
  int bins = 100;
  double q_max = 5.0;

  std::set<std::string> given;
  [[nodiscard]] bool has(const std::string& flag) const { return given.count(flag) > 0; }
};

namespace detail {

// Shortest text that reads back to the same double, for labels.
inline std::string short_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

inline std::string at(const std::string& base, double v) { return base + "@" + short_number(v); }

inline SimConfig sim_config(const Options& o, int m, int n, const CovarianceSpec& cov) {
  return SimConfig{.m = m, .n = n, .cov = cov, .reps = o.reps, .seed = o.seed, .workers = o.workers};
}

inline void echo_sim(RunReport& r, const Options& o) {
  r.param("reps", static_cast<long long>(o.reps));
  r.param("seed", static_cast<long long>(o.seed));
}

inline TruncationPolicy truncation(const Options& o, RunReport& r) {
  TruncationPolicy t{.max_degree = o.trunc_k, .tail_tol = o.tail_tol};
  try {
    t.validate();
  } catch (const error& e) {
    throw usage_error(std::string("--trunc-k/--tail-tol: ") + e.what());
  }
  r.param("trunc_k", static_cast<long long>(o.trunc_k));
  r.param("tail_tol", o.tail_tol);
  return t;
}

// Population eigenvalues from --lambdas (or the given list), else from the
// spiked model with --a, --b and --m. The dimension is echoed as `m`.
inline CovarianceSpec covariance(const Options& o, RunReport& r, const std::vector<double>& lambdas,
                                 const std::string& suffix = "") {
  if (!lambdas.empty()) {
    if (o.has("m") && o.m != static_cast<int>(lambdas.size()))
      throw usage_error("--m " + std::to_string(o.m) + " disagrees with " + std::to_string(lambdas.size()) +
                        " values in --lambdas" + suffix);
    CovarianceSpec cov(lambdas);
    if (suffix.empty()) r.param("m", static_cast<long long>(cov.m()));
    r.param("lambdas" + suffix, join(cov.lambdas()));
    return cov;
  }
  if (suffix.empty()) {
    r.param("m", static_cast<long long>(o.m));
    r.param("a", o.a);
    r.param("b", o.b);
  }
  return CovarianceSpec(SpikedCovParams{.a = o.a, .b = o.b, .m = o.m});
}

// Folds per-point diagnostics into report-wide ones.
struct DiagnosticSummary {
  int max_degree = 0;
  double max_tail = 0.0;
  double max_clamp = 0.0;
  long long unconverged = 0;

  void add(const Diagnostics& d, const std::string& label, RunReport& r) {
    max_degree = std::max(max_degree, d.degree_used);
    max_tail = std::max(max_tail, d.tail_estimate);
    max_clamp = std::max(max_clamp, d.clamp_amount);
    unconverged += !d.converged;
    for (const auto& w : d.warnings) r.warn(label + ": " + w);
  }
  void emit(RunReport& r) const {
    r.diagnostic("max_degree_used", static_cast<long long>(max_degree));
    r.diagnostic("max_tail_estimate", max_tail);
    r.diagnostic("max_clamp", max_clamp);
    r.diagnostic("points_not_converged", unconverged);
  }
};

inline std::vector<double> parse_grid(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof())
    throw usage_error("--q-grid must look like lo:hi:step");
  if (!(step > 0.0) || !(hi >= lo)) throw usage_error("--q-grid needs step > 0 and hi >= lo");
  const auto count = static_cast<long long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw usage_error("--q-grid has more than 100000 points");
  std::vector<double> out;
  // Rounded so that 0.1:5:0.1 gives 0.3 and not 0.30000000000000004.
  for (long long i = 0; i < count; ++i) out.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
  return out;
}

// m rows by n columns of comma-separated numbers, no header.
inline std::vector<std::vector<double>> read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot open data file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t"), e = cell.find_last_not_of(" \t");
      const std::string t = b == std::string::npos ? "" : cell.substr(b, e - b + 1);
      double v = 0;
      const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        throw usage_error(path + ":" + std::to_string(lineno) + ": not a number: '" + t + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw usage_error(path + ":" + std::to_string(lineno) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw usage_error("data file '" + path + "' is empty");
  return rows;
}

// Sample eigenvalues of X'X for an m x n data matrix, descending.
inline std::vector<double> gram_eigenvalues(const std::vector<std::vector<double>>& x) {
  const int m = static_cast<int>(x.size()), n = static_cast<int>(x.front().size());
  if (!(m > n)) throw domain_error("data matrix needs more rows than columns (m > n)");
  std::vector<double> a(static_cast<std::size_t>(m) * n), out(static_cast<std::size_t>(n));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a[static_cast<std::size_t>(j) * m + i] = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  squared_singular_values(a, m, n, out);
  return out;
}

struct StatisticSpec {
  std::string name;
  char kind;  // 'l' ell_i, 's' ell_i / lambda_i, 'r' r_k
  int index;
};

inline StatisticSpec parse_statistic(const std::string& s, int n) {
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  int idx = 0;
  if (colon == std::string::npos ||
      std::from_chars(s.data() + colon + 1, s.data() + s.size(), idx).ptr != s.data() + s.size())
    throw usage_error("--statistic '" + s + "' must be ell:i, scaled:i or rk:k");
  const int limit = kind == "rk" ? n - 1 : n;
  if (idx < 1 || idx > limit) throw usage_error("--statistic '" + s + "': index out of range");
  if (kind == "ell") return {s, 'l', idx};
  if (kind == "scaled") return {s, 's', idx};
  if (kind == "rk") return {s, 'r', idx};
  throw usage_error("--statistic '" + s + "' must be ell:i, scaled:i or rk:k");
}

}  // namespace detail

/// table1/table2: percentiles of l_i / lambda_i (i = 1, 2) for m = 50,
/// n = 10 next to chi-square quantiles with n and n - 1 dof.
inline RunReport cmd_table12(int table, const Options& o) {
  RunReport r;
  r.command = "table" + std::to_string(table);
  const double a = table == 1 ? kCase1A : kCase2A;
  const int m = 50, n = 10;
  r.param("case", static_cast<long long>(table));
  r.param("m", static_cast<long long>(m));
  r.param("n", static_cast<long long>(n));
  r.param("a", a);
  r.param("b", kCaseB);
  detail::echo_sim(r, o);
  const CovarianceSpec cov(SpikedCovParams{.a = a, .b = kCaseB, .m = m});
  const double lam1 = cov[0], lam2 = cov[1];
  const auto sims = run_simulation(detail::sim_config(o, m, n, cov),
                                   {[lam1](const EigenSample& s) { return s.ells[0] / lam1; },
                                    [lam2](const EigenSample& s) { return s.ells[1] / lam2; }});
  for (double alpha : {0.99, 0.95, 0.90, 0.50, 0.05}) {
    r.row(detail::at("l1_percentile", alpha), sims[0].quantile(alpha), Provenance::empirical);
    r.row(detail::at("chisq_n_quantile", alpha), chisq_quantile(alpha, ChiSquare(n)), Provenance::approx);
  }
  for (double alpha : {0.99, 0.95, 0.90, 0.50, 0.05}) {
    r.row(detail::at("l2_percentile", alpha), sims[1].quantile(alpha), Provenance::empirical);
    r.row(detail::at("chisq_n-1_quantile", alpha), chisq_quantile(alpha, ChiSquare(n - 1)), Provenance::approx);
  }
  return r;
}

/// table3 (l_1) / table4 (l_2): chi-square probability at the empirical
/// alpha-percentile of l_i / lambda_i, Case 1, n in {5, 15}, m in {20, 30, 40, 100}.
inline RunReport cmd_table34(int table, const Options& o) {
  RunReport r;
  r.command = "table" + std::to_string(table);
  const int i = table == 3 ? 1 : 2;
  r.param("case", 1LL);
  r.param("eigenvalue", static_cast<long long>(i));
  r.param("n", std::string("5,15"));
  r.param("m", std::string("20,30,40,100"));
  r.param("a", kCase1A);
  r.param("b", kCaseB);
  detail::echo_sim(r, o);
  for (int n : {5, 15})
    for (int m : {20, 30, 40, 100}) {
      const CovarianceSpec cov(SpikedCovParams{.a = kCase1A, .b = kCaseB, .m = m});
      const double lam = cov[static_cast<std::size_t>(i - 1)];
      const auto sim = run_simulation(detail::sim_config(o, m, n, cov),
                                      [lam, i](const EigenSample& s) { return s.ells[static_cast<std::size_t>(i - 1)] / lam; });
      const std::string cell = "n" + std::to_string(n) + "_m" + std::to_string(m);
      for (double alpha : {0.90, 0.95, 0.99}) {
        const double pct = sim.quantile(alpha);
        r.row(detail::at(cell + "_percentile", alpha), pct, Provenance::empirical);
        r.row(detail::at(cell + "_probability", alpha), chisq_cdf(pct, ChiSquare(n - i + 1)), Provenance::empirical);
      }
    }
  return r;
}

/// fig1: (l1^(1)/n1) / (l1^(2)/n2) for two Case 2 populations with m = 30,
/// n1 = n2 = 10, the share of replications below the F(10, 10) 95% point,
/// and optionally an overlay file q,f_approx,empirical_density.
inline RunReport cmd_fig1(const Options& o) {
  RunReport r;
  r.command = "fig1";
  const int m = 30, n = 10;
  r.param("case", 2LL);
  r.param("m", static_cast<long long>(m));
  r.param("n1", static_cast<long long>(n));
  r.param("n2", static_cast<long long>(n));
  r.param("a", kCase2A);
  r.param("b", kCaseB);
  r.param("k", 1LL);
  detail::echo_sim(r, o);
  if (o.bins < 1) throw usage_error("--bins must be positive");
  if (!(o.q_max > 0.0)) throw usage_error("--q-max must be positive");
  if (!o.overlay.empty()) {
    r.param("bins", static_cast<long long>(o.bins));
    r.param("q_max", o.q_max);
  }
  const CovarianceSpec cov(SpikedCovParams{.a = kCase2A, .b = kCaseB, .m = m});
  const auto cfg = detail::sim_config(o, m, n, cov);
  const auto sim = run_two_population(
      cfg, cfg, {[](const EigenSample& x, const EigenSample& y) { return (x.ells[0] / n) / (y.ells[0] / n); }})[0];
  const FDist f(n, n);
  const double crit = f_quantile(0.95, f);
  r.row("f_quantile@0.95", crit, Provenance::approx);
  r.row("coverage@0.95", sim.cdf_at(crit), Provenance::empirical);
  r.row("empirical_quantile@0.95", sim.quantile(0.95), Provenance::empirical);

  if (!o.overlay.empty()) {
    std::ofstream out(o.overlay, std::ios::binary);
    if (!out) throw usage_error("cannot write overlay file '" + o.overlay + "'");
    out << "q,f_approx,empirical_density\n";
    const double width = o.q_max / o.bins;
    for (int b = 0; b < o.bins; ++b) {
      const double lo = b * width, hi = (b + 1) * width, mid = 0.5 * (lo + hi);
      // cdf_at counts values <= x, so bins are (lo, hi].
      const double dens = (sim.cdf_at(hi) - sim.cdf_at(lo)) / width;
      out << format_double(mid) << ',' << format_double(f_pdf(mid, f)) << ',' << format_double(dens) << '\n';
    }
    r.diagnostic("overlay_rows", static_cast<long long>(o.bins));
  }
  return r;
}

/// exact-cdf: Pr(l_1 < x) and its density from the hypergeometric series.
inline RunReport cmd_exact_cdf(const Options& o) {
  RunReport r;
  r.command = "exact-cdf";
  if (o.x.empty()) throw usage_error("exact-cdf needs --x");
  const CovarianceSpec cov = detail::covariance(o, r, o.lambdas);
  r.param("n", static_cast<long long>(o.n));
  const TruncationPolicy trunc = detail::truncation(o, r);
  r.param("x", detail::join(o.x));
  const LargestEigenvalueLaw law(o.n, cov, trunc);
  detail::DiagnosticSummary diag;
  for (double x : o.x) {
    const auto c = law.cdf(x);
    const auto d = law.pdf(x);
    r.row(detail::at("cdf", x), c.value, Provenance::exact);
    r.row(detail::at("pdf", x), d.value, Provenance::exact);
    diag.add(c.diagnostics, detail::at("cdf", x), r);
    diag.add(d.diagnostics, detail::at("pdf", x), r);
  }
  diag.emit(r);
  return r;
}

/// ratio-density: density of l_1^(1) / l_1^(2) on a list or grid of q.
inline RunReport cmd_ratio_density(const Options& o) {
  RunReport r;
  r.command = "ratio-density";
  if (o.q.empty() == o.q_grid.empty()) throw usage_error("ratio-density needs exactly one of --q and --q-grid");
  const auto qs = o.q_grid.empty() ? o.q : detail::parse_grid(o.q_grid);
  const CovarianceSpec cov1 = detail::covariance(o, r, o.lambdas);
  const CovarianceSpec cov2 = o.lambdas2.empty() ? cov1 : detail::covariance(o, r, o.lambdas2, "2");
  r.param("n1", static_cast<long long>(o.n1));
  r.param("n2", static_cast<long long>(o.n2));
  const TruncationPolicy trunc = detail::truncation(o, r);
  const RatioVariant variant = ratio_variant_from_string(o.variant);
  r.param("variant", std::string(to_string(variant)));
  if (o.q_grid.empty())
    r.param("q", detail::join(o.q));
  else
    r.param("q_grid", o.q_grid);

  const RatioDensity f(o.n1, o.n2, cov1, cov2, trunc, variant);
  detail::DiagnosticSummary diag;
  double riemann = 0.0;
  for (double q : qs) {
    const auto e = f(q);
    r.row(detail::at("density", q), e.value, Provenance::exact);
    diag.add(e.diagnostics, detail::at("density", q), r);
    riemann += e.value;
  }
  if (!o.q_grid.empty() && qs.size() > 1) {
    const double step = (qs.back() - qs.front()) / static_cast<double>(qs.size() - 1);
    r.row("sum_density_dq", riemann * step, Provenance::exact);
  }
  diag.emit(r);
  return r;
}

/// simulate: empirical quantiles and mean of the selected statistics.
inline RunReport cmd_simulate(const Options& o) {
  RunReport r;
  r.command = "simulate";
  const CovarianceSpec cov = detail::covariance(o, r, o.lambdas);
  r.param("n", static_cast<long long>(o.n));
  detail::echo_sim(r, o);
  if (o.statistics.empty()) throw usage_error("simulate needs at least one --statistic");
  for (double p : o.probs)
    if (!(p > 0.0 && p < 1.0)) throw usage_error("--probs must lie in (0, 1)");
  std::vector<detail::StatisticSpec> specs;
  std::vector<Statistic> stats;
  std::string names;
  for (const auto& s : o.statistics) {
    const auto spec = detail::parse_statistic(s, o.n);
    specs.push_back(spec);
    names += (names.empty() ? "" : ",") + s;
    const auto i = static_cast<std::size_t>(spec.index - 1);
    const double lam = spec.index <= cov.m() ? cov[i] : 1.0;
    switch (spec.kind) {
      case 'l': stats.emplace_back([i](const EigenSample& e) { return e.ells[i]; }); break;
      case 's': stats.emplace_back([i, lam](const EigenSample& e) { return e.ells[i] / lam; }); break;
      default: stats.emplace_back([k = spec.index](const EigenSample& e) { return sample_dispersion_rk(e, k); });
    }
  }
  r.param("statistics", names);
  r.param("probs", detail::join(o.probs));
  const auto sims = run_simulation(detail::sim_config(o, cov.m(), o.n, cov), stats);
  for (std::size_t s = 0; s < specs.size(); ++s) {
    const auto& v = sims[s].sorted_values();
    long double sum = 0.0L;
    for (double x : v) sum += x;
    r.row(specs[s].name + ":mean", static_cast<double>(sum / v.size()), Provenance::empirical);
    for (double p : o.probs) {
      if (v.size() >= 2) r.row(detail::at(specs[s].name, p), sims[s].quantile(p), Provenance::empirical);
      if (specs[s].kind == 's')
        r.row(detail::at(specs[s].name + ":chisq_approx", p), chisq_quantile(p, ChiSquare(o.n - specs[s].index + 1)),
              Provenance::approx);
    }
  }
  return r;
}

/// test-equality: F test of lambda_k^(1) = lambda_k^(2) from two l_k values
/// or from two raw data matrices.
inline RunReport cmd_test_equality(const Options& o) {
  RunReport r;
  r.command = "test-equality";
  const bool values = o.has("ell1") || o.has("ell2");
  const bool data = o.has("data1") || o.has("data2");
  if (values == data) throw usage_error("test-equality needs either --ell1/--ell2 or --data1/--data2");
  double l1 = o.ell1, l2 = o.ell2;
  int n1 = o.n1, n2 = o.n2;
  if (values) {
    if (!(o.has("ell1") && o.has("ell2"))) throw usage_error("test-equality needs both --ell1 and --ell2");
    r.param("ell1", l1);
    r.param("ell2", l2);
  } else {
    if (!(o.has("data1") && o.has("data2"))) throw usage_error("test-equality needs both --data1 and --data2");
    const auto x1 = detail::read_matrix(o.data1), x2 = detail::read_matrix(o.data2);
    if (x1.size() != x2.size()) throw domain_error("data matrices have different numbers of rows");
    n1 = static_cast<int>(x1.front().size());
    n2 = static_cast<int>(x2.front().size());
    if ((o.has("n1") && o.n1 != n1) || (o.has("n2") && o.n2 != n2))
      throw usage_error("--n1/--n2 disagree with the data matrix columns");
    if (o.k < 1 || o.k > std::min(n1, n2)) throw domain_error("test-equality: need 1 <= k <= min(n1, n2)");
    const auto e1 = detail::gram_eigenvalues(x1), e2 = detail::gram_eigenvalues(x2);
    l1 = e1[static_cast<std::size_t>(o.k - 1)];
    l2 = e2[static_cast<std::size_t>(o.k - 1)];
    r.param("data1", o.data1);
    r.param("data2", o.data2);
    r.param("m", static_cast<long long>(x1.size()));
    r.row("ell1", l1, Provenance::empirical);
    r.row("ell2", l2, Provenance::empirical);
  }
  r.param("k", static_cast<long long>(o.k));
  r.param("n1", static_cast<long long>(n1));
  r.param("n2", static_cast<long long>(n2));
  r.param("alpha", o.alpha);
  const auto t = equality_test(l1, l2, o.k, n1, n2, o.alpha);
  r.row("statistic", t.statistic, Provenance::empirical);
  r.row("dof1", static_cast<long long>(t.dof1), Provenance::approx);
  r.row("dof2", static_cast<long long>(t.dof2), Provenance::approx);
  r.row("p_value", t.p_value, Provenance::approx);
  r.row("decision", std::string(t.rejected ? "reject" : "fail to reject"), Provenance::approx);
  return r;
}

inline void write_report(std::ostream& os, const RunReport& r, const std::string& format) {
  if (format == "json")
    write_json(os, r);
  else
    write_csv(os, r);
}

/// Parses argv, runs one command and writes its report to `out`. Returns the
/// process exit status: 0, 2 for usage errors, 3 for domain or numeric ones.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvalue distributions of singular Wishart matrices"};
  app.require_subcommand(1);
  Options o;

  auto model = [&](CLI::App* s) {
    s->add_option("--m", o.m, "dimension (rows of the data matrix)");
    s->add_option("--a", o.a, "spiked model: lambda_i = a^(b/i)");
    s->add_option("--b", o.b, "spiked model exponent");
    s->add_option("--lambdas", o.lambdas, "population eigenvalues, overrides --a/--b")->delimiter(',');
  };
  auto sim = [&](CLI::App* s) {
    s->add_option("--reps", o.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    s->add_option("--seed", o.seed, "random seed");
    s->add_option("--workers", o.workers, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  };
  auto series = [&](CLI::App* s) {
    s->add_option("--trunc-k", o.trunc_k, "maximum series degree");
    s->add_option("--tail-tol", o.tail_tol, "relative tail tolerance");
  };
  auto common = [&](CLI::App* s) {
    s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    s->add_flag("--timing", o.timing, "add wall time and worker count to the diagnostics");
  };

  std::vector<CLI::App*> tables;
  for (const char* name : {"table1", "table2", "table3", "table4"}) {
    auto* s = app.add_subcommand(name, std::string("reproduce ") + name);
    sim(s);
    common(s);
    tables.push_back(s);
  }
  auto* fig1 = app.add_subcommand("fig1", "F approximation coverage and overlay data");
  sim(fig1);
  common(fig1);
  fig1->add_option("--overlay", o.overlay, "write q,f_approx,empirical_density to this file");
  fig1->add_option("--bins", o.bins, "overlay histogram bins");
  fig1->add_option("--q-max", o.q_max, "overlay range upper end");

  auto* exact = app.add_subcommand("exact-cdf", "exact distribution of the largest eigenvalue");
  model(exact);
  series(exact);
  common(exact);
  exact->add_option("--n", o.n, "degrees of freedom");
  exact->add_option("--x", o.x, "evaluation points")->delimiter(',')->required();

  auto* ratio = app.add_subcommand("ratio-density", "density of the ratio of two largest eigenvalues");
  model(ratio);
  series(ratio);
  common(ratio);
  ratio->add_option("--n1", o.n1, "degrees of freedom, population 1");
  ratio->add_option("--n2", o.n2, "degrees of freedom, population 2");
  ratio->add_option("--lambdas2", o.lambdas2, "population 2 eigenvalues (default: same as population 1)")
      ->delimiter(',');
  ratio->add_option("--q", o.q, "evaluation points")->delimiter(',');
  ratio->add_option("--q-grid", o.q_grid, "lo:hi:step");
  ratio->add_option("--variant", o.variant, "printed or rederived")->check(CLI::IsMember({"printed", "rederived"}));

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo quantiles of eigenvalue statistics");
  model(simulate);
  sim(simulate);
  common(simulate);
  simulate->add_option("--n", o.n, "degrees of freedom");
  simulate->add_option("--statistic", o.statistics, "ell:i, scaled:i (l_i/lambda_i) or rk:k")->delimiter(',');
  simulate->add_option("--probs", o.probs, "quantile levels")->delimiter(',');

  auto* equality = app.add_subcommand("test-equality", "test lambda_k equal across two populations");
  common(equality);
  equality->add_option("--ell1", o.ell1, "l_k of population 1");
  equality->add_option("--ell2", o.ell2, "l_k of population 2");
  equality->add_option("--data1", o.data1, "CSV data matrix of population 1 (m rows, n1 columns)");
  equality->add_option("--data2", o.data2, "CSV data matrix of population 2 (m rows, n2 columns)");
  equality->add_option("--k", o.k, "eigenvalue index");
  equality->add_option("--n1", o.n1, "degrees of freedom, population 1");
  equality->add_option("--n2", o.n2, "degrees of freedom, population 2");
  equality->add_option("--alpha", o.alpha, "significance level");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  for (const auto* opt : chosen->get_options())
    if (opt->count() > 0) o.given.insert(opt->get_name(false, true).substr(2));

  try {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    const std::string name = chosen->get_name();
    if (name == "fig1")
      report = cmd_fig1(o);
    else if (name == "table1" || name == "table2")
      report = cmd_table12(name.back() - '0', o);
    else if (name == "table3" || name == "table4")
      report = cmd_table34(name.back() - '0', o);
    else if (name == "exact-cdf")
      report = cmd_exact_cdf(o);
    else if (name == "ratio-density")
      report = cmd_ratio_density(o);
    else if (name == "simulate")
      report = cmd_simulate(o);
    else
      report = cmd_test_equality(o);
    if (o.timing) {
      report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      report.diagnostic("workers", static_cast<long long>(o.workers));
    }
    write_report(out, report, o.format);
    return kExitOk;
  } catch (const usage_error& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace wisheig::cli
