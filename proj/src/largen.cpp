#include "branchlab/largen.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace branchlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

BigInt binomial_exact(std::uint64_t n, std::uint64_t k) {
  require(k <= n, "binomial_exact: k > n");
  if (k > n - k) k = n - k;
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= (n - k + i);
    r /= i;
  }
  return r;
}

double log10_bigint(const BigInt& v) {
  require(v > 0, "log10_bigint: value must be positive");
  const std::string s = v.str();
  // leading 17 digits carry full double precision
  const std::size_t lead = std::min<std::size_t>(s.size(), 17);
  const double mant = std::stod(s.substr(0, lead));
  return std::log10(mant) + static_cast<double>(s.size() - lead);
}

std::size_t decimal_digits(const BigInt& v) {
  require(v > 0, "decimal_digits: value must be positive");
  return v.str().size();
}

BigInt versions_count(std::uint64_t n_runs) {
  require(n_runs <= 100000, "versions_count: N too large");
  return BigInt(1) << n_runs;
}

double branch_class_log_amp2(std::uint64_t n_runs, std::uint64_t n, double p) {
  require(n <= n_runs, "branch_class_log_amp2: n > N");
  if (p == 0.0 || p == 1.0) {
    // degenerate: all weight on n = 0 or n = N
    const bool carries = (p == 1.0) ? (n == n_runs) : (n == 0);
    return carries ? 0.0 : -std::numeric_limits<double>::infinity();
  }
  require(p > 0.0 && p < 1.0, "branch_class_log_amp2: p out of range");
  const double dN = static_cast<double>(n_runs);
  const double dn = static_cast<double>(n);
  return std::lgamma(dN + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dN - dn + 1.0) +
         dn * std::log(p) + (dN - dn) * std::log1p(-p);
}

BigRational branch_class_amp2_exact(std::uint64_t n_runs, std::uint64_t n,
                                    const BigRational& p) {
  require(n <= n_runs, "branch_class_amp2_exact: n > N");
  BigRational q = BigRational(1) - p;
  BigRational r(binomial_exact(n_runs, n));
  for (std::uint64_t i = 0; i < n; ++i) r *= p;
  for (std::uint64_t i = 0; i < n_runs - n; ++i) r *= q;
  return r;
}

double branch_count_ratio_log10(std::uint64_t n_runs, std::uint64_t n1, std::uint64_t n2) {
  return log10_bigint(binomial_exact(n_runs, n1)) - log10_bigint(binomial_exact(n_runs, n2));
}

double MacroDistribution::weight(std::uint64_t n) const {
  return std::exp(log_weight.at(n) - log_norm);
}

MacroDistribution induced_macro_distribution(const ProbabilityLaw& law, std::uint64_t n_runs,
                                             double p) {
  require(p > 0.0 && p < 1.0, "induced_macro_distribution: p must be in (0,1)");
  MacroDistribution d;
  d.n_runs = n_runs;
  d.p = p;
  d.law_name = law.name();
  d.log_weight.resize(n_runs + 1);
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double dN = static_cast<double>(n_runs);
  double max_lw = -std::numeric_limits<double>::infinity();
  for (std::uint64_t n = 0; n <= n_runs; ++n) {
    const double dn = static_cast<double>(n);
    const double log_count =
        std::lgamma(dN + 1.0) - std::lgamma(dn + 1.0) - std::lgamma(dN - dn + 1.0);
    const double log_x = dn * lp + (dN - dn) * lq;  // per-branch squared amplitude
    const double lw = log_count + law.log_eval(0, log_x);
    d.log_weight[n] = lw;
    if (lw > max_lw) {
      max_lw = lw;
      d.mode = n;
    }
  }
  require(std::isfinite(max_lw), "induced_macro_distribution: law gives zero total weight");
  // log-sum-exp normalization plus weighted moments
  double sum = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::uint64_t n = 0; n <= n_runs; ++n) {
    const double w = std::exp(d.log_weight[n] - max_lw);
    sum += w;
    m1 += w * static_cast<double>(n);
    m2 += w * static_cast<double>(n) * static_cast<double>(n);
  }
  d.log_norm = max_lw + std::log(sum);
  d.mean = m1 / sum;
  d.sigma = std::sqrt(std::max(0.0, m2 / sum - d.mean * d.mean));
  return d;
}

ModeWidth mode_and_width(const MacroDistribution& d) { return {d.mode, d.sigma}; }

RunByRunReport run_by_run_experiment(const ProbabilityLaw& law, std::uint64_t n_runs, double p,
                                     std::uint64_t runs, std::uint64_t seed) {
  require(p > 0.0 && p < 1.0, "run_by_run_experiment: p must be in (0,1)");
  const double w1 = law.eval(0, p);
  const double w2 = law.eval(1, 1.0 - p);
  require(w1 + w2 > 0.0, "run_by_run_experiment: zero total per-run weight");
  RunByRunReport rep;
  rep.per_run_probability = w1 / (w1 + w2);
  rep.runs = runs;
  const MacroDistribution d = induced_macro_distribution(law, n_runs, p);
  rep.macro_mode_fraction = static_cast<double>(d.mode) / static_cast<double>(n_runs);
  if (runs == 0) return rep;  // empty report
  std::uint64_t hits = 0;
  for (std::uint64_t m = 0; m < runs; ++m) {
    Rng rng(derive_seed(seed, m));
    if (rng.bernoulli(rep.per_run_probability)) ++hits;
  }
  rep.empirical_frequency = static_cast<double>(hits) / static_cast<double>(runs);
  return rep;
}

}  // namespace branchlab
