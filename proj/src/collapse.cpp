#include "branchlab/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace branchlab {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void check_normalized(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  require(std::abs(s - 1.0) <= 1e-10, "amplitude list not normalized");
}

}  // namespace

LinearEvolutionFamily::LinearEvolutionFamily(std::vector<double> times,
                                             std::vector<std::vector<Amplitude>> branch_multipliers)
    : times_(std::move(times)), mult_(std::move(branch_multipliers)) {
  require(!mult_.empty() && times_.size() == mult_.size(),
          "LinearEvolutionFamily: one multiplier row per time");
  n_ = static_cast<int>(mult_.front().size());
  require(n_ >= 1, "LinearEvolutionFamily: empty branch set");
  for (const auto& row : mult_) {
    require(static_cast<int>(row.size()) == n_, "LinearEvolutionFamily: ragged rows");
    double total = 0.0;
    for (const auto& b : row) total += std::norm(b);
    require(total > 0.0, "LinearEvolutionFamily: operator annihilates all branches");
  }
}

LinearEvolutionFamily LinearEvolutionFamily::random(int n, std::size_t steps, Rng& rng) {
  std::vector<double> times;
  std::vector<std::vector<Amplitude>> mult;
  for (std::size_t t = 0; t < steps; ++t) {
    times.push_back(static_cast<double>(t));
    std::vector<Amplitude> row;
    for (int k = 0; k < n; ++k) {
      const double mag = std::exp(rng.normal());
      const double phase = rng.uniform(0.0, 6.283185307179586);
      row.emplace_back(mag * std::cos(phase), mag * std::sin(phase));
    }
    mult.push_back(std::move(row));
  }
  return LinearEvolutionFamily(std::move(times), std::move(mult));
}

LinearEvolutionFamily LinearEvolutionFamily::random_unitary_family(int n, std::size_t steps,
                                                                   Rng& rng) {
  std::vector<double> times;
  std::vector<std::vector<Amplitude>> mult;
  for (std::size_t t = 0; t < steps; ++t) {
    times.push_back(static_cast<double>(t));
    std::vector<Amplitude> row;
    for (int k = 0; k < n; ++k) {
      const double phase = rng.uniform(0.0, 6.283185307179586);
      row.emplace_back(std::cos(phase), std::sin(phase));
    }
    mult.push_back(std::move(row));
  }
  return LinearEvolutionFamily(std::move(times), std::move(mult));
}

CollapseTrajectory linear_X(const LinearEvolutionFamily& fam, const std::vector<double>& a) {
  check_normalized(a);
  require(static_cast<int>(a.size()) == fam.branch_count(),
          "linear_X: amplitude count != branch count");
  const int n = fam.branch_count();
  CollapseTrajectory tr;
  tr.times = fam.times();
  for (std::size_t t = 0; t < fam.times().size(); ++t) {
    std::vector<Amplitude> beta(static_cast<std::size_t>(n));
    std::vector<double> x(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      beta[static_cast<std::size_t>(k)] = fam.beta(t, k);
      total += std::norm(beta[static_cast<std::size_t>(k)]);
    }
    for (int k = 0; k < n; ++k)
      x[static_cast<std::size_t>(k)] = std::norm(beta[static_cast<std::size_t>(k)]) / total;
    tr.beta.push_back(std::move(beta));
    tr.weights.push_back(std::move(x));
  }
  tr.resolved = true;
  return tr;
}

BornViolationCertificate born_violation_certificate(
    const LinearEvolutionFamily& fam, const std::vector<std::vector<double>>& a_set) {
  BornViolationCertificate cert;
  require(!a_set.empty(), "born_violation_certificate: empty amplitude set");
  const int n = fam.branch_count();
  for (const auto& a : a_set) {
    const CollapseTrajectory tr = linear_X(fam, a);
    std::vector<double> avg(static_cast<std::size_t>(n), 0.0);
    for (const auto& row : tr.weights)
      for (int k = 0; k < n; ++k) avg[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k)];
    for (auto& v : avg) v /= static_cast<double>(tr.weights.size());
    cert.average_X.push_back(std::move(avg));
  }
  std::vector<std::vector<double>> distinct;
  for (const auto& a : a_set)
    if (std::find(distinct.begin(), distinct.end(), a) == distinct.end()) distinct.push_back(a);
  if (distinct.size() < 2) {
    cert.vacuous = true;
    return cert;
  }
  for (int k = 0; k < n; ++k) {
    double lo = cert.average_X.front()[static_cast<std::size_t>(k)];
    double hi = lo;
    for (const auto& avg : cert.average_X) {
      lo = std::min(lo, avg[static_cast<std::size_t>(k)]);
      hi = std::max(hi, avg[static_cast<std::size_t>(k)]);
    }
    cert.max_average_spread = std::max(cert.max_average_spread, hi - lo);
  }
  cert.min_target_gap = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < a_set.size(); ++s) {
    double gap = 0.0;
    for (int k = 0; k < n; ++k)
      gap = std::max(gap, std::abs(cert.average_X[s][static_cast<std::size_t>(k)] -
                                   a_set[s][static_cast<std::size_t>(k)] *
                                       a_set[s][static_cast<std::size_t>(k)]));
    cert.min_target_gap = std::min(cert.min_target_gap, gap);
  }
  // the averages are coefficient-independent; distinct |a|^2 targets cannot
  // both be matched, so at least one set misses its Born profile
  cert.contradiction = cert.max_average_spread <= 1e-15 && cert.min_target_gap > 1e-12;
  return cert;
}

CollapseTrajectory stochastic_collapse_run(const std::vector<double>& a,
                                           const CollapseParams& params, std::uint64_t seed) {
  check_normalized(a);
  require(params.sigma > 0.0 && params.dt > 0.0, "stochastic_collapse_run: sigma, dt must be > 0");
  const std::size_t n = a.size();
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * a[k];

  Rng rng(seed);
  CollapseTrajectory tr;
  const double sqdt = std::sqrt(params.dt);
  std::vector<double> dw(n);
  auto record = [&](std::size_t step) {
    tr.times.push_back(static_cast<double>(step) * params.dt);
    tr.weights.push_back(x);
  };
  record(0);
  std::size_t step = 0;
  for (; step < params.max_steps; ++step) {
    double best = 0.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < n; ++k)
      if (x[k] > best) {
        best = x[k];
        best_k = k;
      }
    if (best > params.absorb_threshold) {
      tr.resolved = true;
      tr.outcome = static_cast<int>(best_k) + 1;
      break;
    }
    double common = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      dw[k] = sqdt * rng.normal();
      common += x[k] * dw[k];
    }
    bool clipped = false;
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += params.sigma * x[k] * (dw[k] - common);
      if (x[k] < 0.0) {
        x[k] = 0.0;
        clipped = true;
      }
      total += x[k];
    }
    if (clipped || std::abs(total - 1.0) > 1e-12) {
      for (std::size_t k = 0; k < n; ++k) x[k] /= total;
      if (clipped) ++tr.clipped_steps;
    }
    if (params.record_stride && (step + 1) % params.record_stride == 0) record(step + 1);
  }
  record(step);
  return tr;
}

CollapseStatistics collapse_statistics(const std::vector<double>& a, std::uint64_t runs,
                                       const CollapseParams& params, std::uint64_t seed) {
  require(runs >= 100, "collapse_statistics: need at least 100 runs");
  check_normalized(a);
  const std::size_t n = a.size();
  CollapseStatistics st;
  st.runs = runs;
  st.target.resize(n);
  for (std::size_t k = 0; k < n; ++k) st.target[k] = a[k] * a[k];
  // degenerate components never absorb elsewhere
  std::vector<std::uint64_t> counts(n, 0);
  std::size_t total_clipped = 0;
  std::uint64_t total_steps = 0;
  for (std::uint64_t m = 0; m < runs; ++m) {
    CollapseTrajectory tr = stochastic_collapse_run(a, params, derive_seed(seed, m));
    if (!tr.resolved) {
      ++st.unresolved;
      continue;
    }
    ++counts[static_cast<std::size_t>(tr.outcome - 1)];
    total_clipped += tr.clipped_steps;
    total_steps += static_cast<std::uint64_t>(tr.times.back() / params.dt);
  }
  st.clip_fraction =
      total_steps ? static_cast<double>(total_clipped) / static_cast<double>(total_steps) : 0.0;
  st.frequency.resize(n);
  st.ci_halfwidth.resize(n);
  st.pass = st.unresolved == 0;
  for (std::size_t k = 0; k < n; ++k) {
    st.frequency[k] = static_cast<double>(counts[k]) / static_cast<double>(runs);
    const double p = st.target[k];
    st.ci_halfwidth[k] = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(runs));
    if (std::abs(st.frequency[k] - p) > std::max(st.ci_halfwidth[k], 1e-12)) st.pass = false;
  }
  return st;
}

}  // namespace branchlab
