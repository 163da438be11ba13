#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "branchlab/bornlaw.hpp"

namespace branchlab {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Exact binomial coefficient C(n, k).
BigInt binomial_exact(std::uint64_t n, std::uint64_t k);

/// log10 of a positive big integer, accurate to ~1e-15 relative.
double log10_bigint(const BigInt& v);

/// Number of decimal digits of a positive big integer.
std::size_t decimal_digits(const BigInt& v);

/// Exact 2^N.
BigInt versions_count(std::uint64_t n_runs);

/// log |A(n)|^2 (natural log) for the n-successes branch class of N runs at
/// per-run weight p, via log-gamma.
double branch_class_log_amp2(std::uint64_t n_runs, std::uint64_t n, double p);

/// Exact |A(n)|^2 as a rational, for rational p = num/den. Intended for
/// moderate N (cross-checks the log-space path).
BigRational branch_class_amp2_exact(std::uint64_t n_runs, std::uint64_t n,
                                    const BigRational& p);

/// log10 of C(N, n1) / C(N, n2), computed from exact big integers.
double branch_count_ratio_log10(std::uint64_t n_runs, std::uint64_t n1, std::uint64_t n2);

/// Induced distribution over the run-count n for N repetitions under a
/// micro-law: weight(n) proportional to C(N,n) * law(p^n (1-p)^(N-n)),
/// normalized over n (the normalization convention is part of the report).
struct MacroDistribution {
  std::uint64_t n_runs = 0;
  double p = 0.0;
  std::string law_name;
  std::vector<double> log_weight;  // unnormalized, natural log, index n
  double log_norm = 0.0;           // log of the normalizing constant
  std::uint64_t mode = 0;
  double mean = 0.0;
  double sigma = 0.0;

  double weight(std::uint64_t n) const;  // normalized
};

MacroDistribution induced_macro_distribution(const ProbabilityLaw& law, std::uint64_t n_runs,
                                             double p);

struct ModeWidth {
  std::uint64_t mode = 0;
  double sigma = 0.0;
};

ModeWidth mode_and_width(const MacroDistribution& d);

/// Contrast of per-run perception statistics with the end-of-N macro mode.
struct RunByRunReport {
  double per_run_probability = 0.0;  // law(p) / (law(p) + law(1-p)), closed form
  double empirical_frequency = 0.0;
  std::uint64_t runs = 0;
  double macro_mode_fraction = 0.0;  // mode / N of the induced distribution
};

RunByRunReport run_by_run_experiment(const ProbabilityLaw& law, std::uint64_t n_runs, double p,
                                     std::uint64_t runs, std::uint64_t seed);

}  // namespace branchlab
