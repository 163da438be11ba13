#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "branchlab/largen.hpp"

using namespace branchlab;

TEST_CASE("binomial_exact basics") {
  CHECK(binomial_exact(0, 0) == 1);
  CHECK(binomial_exact(5, 2) == 10);
  CHECK(binomial_exact(10, 10) == 1);
  CHECK(binomial_exact(52, 5) == 2598960);
  CHECK_THROWS_AS(binomial_exact(3, 4), std::invalid_argument);
}

TEST_CASE("binomial_exact matches the Pascal recurrence up to N=200") {
  // independent oracle: additive recurrence, no multiplication or division
  std::vector<BigInt> row{1};
  for (std::uint64_t n = 1; n <= 200; ++n) {
    std::vector<BigInt> next(n + 1, BigInt(1));
    for (std::uint64_t k = 1; k < n; ++k) next[k] = row[k - 1] + row[k];
    row = std::move(next);
    if (n % 40 == 0)
      for (std::uint64_t k = 0; k <= n; k += 17) CHECK(binomial_exact(n, k) == row[k]);
  }
}

TEST_CASE("versions_count and digit counting") {
  CHECK(versions_count(10) == 1024);
  CHECK(decimal_digits(versions_count(10)) == 4);
  CHECK(decimal_digits(versions_count(10000)) == 3011);
  CHECK_THROWS_AS(versions_count(100001), std::invalid_argument);
  CHECK_THROWS_AS(decimal_digits(BigInt(0)), std::invalid_argument);
}

TEST_CASE("log10_bigint agrees with lgamma on factorial-scale values") {
  // oracle: log10(C(n,k)) via log-gamma
  for (std::uint64_t n : {50ULL, 500ULL, 5000ULL}) {
    const std::uint64_t k = n / 3;
    const double lg = (std::lgamma(static_cast<double>(n) + 1.0) -
                       std::lgamma(static_cast<double>(k) + 1.0) -
                       std::lgamma(static_cast<double>(n - k) + 1.0)) /
                      std::log(10.0);
    CHECK(log10_bigint(binomial_exact(n, k)) == doctest::Approx(lg).epsilon(1e-10));
  }
  CHECK(log10_bigint(BigInt(1000)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("exact rational amplitudes cross-check the log-space path at N=20") {
  const BigRational p(9, 10);
  for (std::uint64_t n = 0; n <= 20; ++n) {
    const BigRational exact = branch_class_amp2_exact(20, n, p);
    const double approx = std::exp(branch_class_log_amp2(20, n, 0.9));
    const double ex = exact.convert_to<double>();
    CHECK(approx == doctest::Approx(ex).epsilon(1e-10));
  }
  // exact normalization: sum over n equals 1 as a rational identity
  BigRational total(0);
  for (std::uint64_t n = 0; n <= 20; ++n) total += branch_class_amp2_exact(20, n, p);
  CHECK(total == BigRational(1));
}

TEST_CASE("degenerate per-run weights") {
  CHECK(branch_class_log_amp2(10, 10, 1.0) == 0.0);
  CHECK(branch_class_log_amp2(10, 3, 1.0) == -std::numeric_limits<double>::infinity());
  CHECK(branch_class_log_amp2(10, 0, 0.0) == 0.0);
}

TEST_CASE("branch count ratio at N=10000") {
  const double r = branch_count_ratio_log10(10000, 5000, 9000);
  // oracle via lgamma
  auto lgc = [](double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  };
  CHECK(r == doctest::Approx((lgc(10000, 5000) - lgc(10000, 9000)) / std::log(10.0))
                 .epsilon(1e-9));
  CHECK(r > 1590.0);
  CHECK(r < 1600.0);
  // the round claim of 800 orders of magnitude is off by about a factor 2
  CHECK(std::abs(r - 800.0) > 1.0);
}

TEST_CASE("born macro distribution concentrates at n = Np") {
  const MacroDistribution d = induced_macro_distribution(ProbabilityLaw::born(), 10000, 0.9);
  CHECK(d.mode == 9000);
  CHECK(d.mean == doctest::Approx(9000.0).epsilon(1e-6));
  CHECK(d.sigma == doctest::Approx(30.0).epsilon(0.01));
  // normalized weights sum to 1
  double sum = 0.0;
  for (std::uint64_t n = 0; n <= 10000; ++n) sum += d.weight(n);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
  // weight at the mode matches the binomial pmf (lgamma oracle)
  const double pmf = std::exp(std::lgamma(10001.0) - std::lgamma(9001.0) -
                              std::lgamma(1001.0) + 9000.0 * std::log(0.9) +
                              1000.0 * std::log(0.1));
  CHECK(d.weight(9000) == doctest::Approx(pmf).epsilon(1e-9));
}

TEST_CASE("affine quadratic micro-law washes out at the macro mode") {
  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  for (std::uint64_t n_runs : {100ULL, 1000ULL, 10000ULL}) {
    const MacroDistribution d = induced_macro_distribution(aq, n_runs, 0.9);
    CHECK(static_cast<double>(d.mode) == 0.9 * static_cast<double>(n_runs));
  }
}

TEST_CASE("quadratic-term mass bound") {
  // mass of the beta x^2 part summed over branch classes is exactly
  // beta * (p^2 + (1-p)^2)^N by the binomial theorem
  const double p = 0.9, beta = 0.2;
  for (std::uint64_t n_runs : {100ULL, 1000ULL}) {
    double max_l = -std::numeric_limits<double>::infinity();
    std::vector<double> ls(n_runs + 1);
    for (std::uint64_t n = 0; n <= n_runs; ++n) {
      const double dn = static_cast<double>(n), dN = static_cast<double>(n_runs);
      const double log_count =
          std::lgamma(dN + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dN - dn + 1.0);
      const double log_x = dn * std::log(p) + (dN - dn) * std::log1p(-p);
      ls[n] = std::log(beta) + log_count + 2.0 * log_x;
      max_l = std::max(max_l, ls[n]);
    }
    double sum = 0.0;
    for (double l : ls) sum += std::exp(l - max_l);
    const double log_mass = max_l + std::log(sum);
    const double log_bound =
        std::log(beta) + static_cast<double>(n_runs) * std::log(p * p + (1 - p) * (1 - p));
    CHECK(log_mass == doctest::Approx(log_bound).epsilon(1e-12));
  }
}

TEST_CASE("run-by-run statistics distinguish the micro-laws") {
  const std::uint64_t runs = 10000;
  const RunByRunReport born =
      run_by_run_experiment(ProbabilityLaw::born(), 10000, 0.9, runs, 5);
  CHECK(born.per_run_probability == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(born.macro_mode_fraction == doctest::Approx(0.9).epsilon(1e-12));

  const ProbabilityLaw aq = ProbabilityLaw::affine_quadratic(0.8, 0.2);
  const RunByRunReport alt = run_by_run_experiment(aq, 10000, 0.9, runs, 5);
  // closed form: law(0.9)/(law(0.9)+law(0.1)) = 0.882/0.964
  CHECK(alt.per_run_probability == doctest::Approx(0.882 / 0.964).epsilon(1e-12));
  CHECK(alt.macro_mode_fraction == doctest::Approx(0.9).epsilon(1e-12));

  // the two per-run frequencies are distinguishable at 3 sigma with 10^4 runs
  const double gap = std::abs(alt.per_run_probability - 0.9);
  const double ci = 3.0 * std::sqrt(0.9 * 0.1 / static_cast<double>(runs));
  CHECK(gap > ci);
  CHECK(std::abs(born.empirical_frequency - 0.9) <= ci);
  CHECK(std::abs(alt.empirical_frequency - alt.per_run_probability) <= ci);
}

TEST_CASE("empty run-by-run report") {
  const RunByRunReport rep =
      run_by_run_experiment(ProbabilityLaw::born(), 100, 0.9, 0, 1);
  CHECK(rep.runs == 0);
  CHECK(rep.empirical_frequency == 0.0);
}
