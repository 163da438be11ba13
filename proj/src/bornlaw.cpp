#include "branchlab/bornlaw.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace branchlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

double c_at(const std::vector<double>& c, int k) {
  if (c.empty()) return 0.0;
  if (c.size() == 1) return c[0];
  return c.at(static_cast<std::size_t>(k));
}

// Gaussian elimination with partial pivoting; throws on (near-)singularity.
std::vector<double> solve_linear(std::vector<std::vector<double>> m, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    require(std::abs(m[piv][col]) > 1e-12, "degenerate probe set");
    std::swap(m[col], m[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) s -= m[r][c] * x[c];
    x[r] = s / m[r][r];
  }
  return x;
}

}  // namespace

ProbabilityLaw ProbabilityLaw::born() {
  ProbabilityLaw law;
  law.kind_ = Kind::Born;
  law.name_ = "born";
  return law;
}

ProbabilityLaw ProbabilityLaw::affine_quadratic(double alpha, double beta) {
  ProbabilityLaw law;
  law.kind_ = Kind::AffineQuadratic;
  law.name_ = "affine_quadratic";
  law.alpha_ = alpha;
  law.beta_ = beta;
  return law;
}

ProbabilityLaw ProbabilityLaw::odd_counterexample(double eps) {
  require(eps >= 0.0 && eps <= 0.1, "odd_counterexample: need 0 <= eps <= 0.1");
  ProbabilityLaw law;
  law.kind_ = eps == 0.0 ? Kind::Born : Kind::OddCounterexample;
  law.name_ = eps == 0.0 ? "born" : "odd_counterexample";
  law.epsilon_ = eps;
  return law;
}

ProbabilityLaw ProbabilityLaw::general_affine(double lambda, std::vector<double> c) {
  ProbabilityLaw law;
  law.kind_ = Kind::GeneralAffine;
  law.name_ = "general_affine";
  law.lambda_ = lambda;
  law.c_ = std::move(c);
  return law;
}

ProbabilityLaw ProbabilityLaw::custom(std::string name, std::function<double(int, double)> fn) {
  ProbabilityLaw law;
  law.kind_ = Kind::Custom;
  law.name_ = std::move(name);
  law.fn_ = std::move(fn);
  return law;
}

double ProbabilityLaw::eval(int k, double x) const {
  switch (kind_) {
    case Kind::Born:
      return x;
    case Kind::AffineQuadratic:
      return alpha_ * x + beta_ * x * x;
    case Kind::OddCounterexample:
      return x + epsilon_ * std::sin(kTwoPi * x);
    case Kind::GeneralAffine:
      return 0.5 * lambda_ * x + c_at(c_, k);
    case Kind::Custom:
      return fn_(k, x);
  }
  return x;
}

double ProbabilityLaw::log_eval(int k, double log_x) const {
  switch (kind_) {
    case Kind::Born:
      return log_x;
    case Kind::AffineQuadratic:
      // log(alpha*x + beta*x^2) = log(x) + log(alpha + beta*x)
      return log_x + std::log(alpha_ + beta_ * std::exp(log_x));
    case Kind::GeneralAffine: {
      const double c = c_at(c_, k);
      if (c == 0.0) return std::log(0.5 * lambda_) + log_x;
      break;
    }
    default:
      break;
  }
  return std::log(eval(k, std::exp(log_x)));
}

ReductionResult single_detector_reduction(const StateVector& psi, const StateVector& target) {
  require(std::abs(psi.norm() - 1.0) <= 1e-10, "single_detector_reduction: psi not normalized");
  require(std::abs(target.norm() - 1.0) <= 1e-10,
          "single_detector_reduction: target not normalized");
  const Amplitude c = inner_product(target, psi);
  ReductionResult res;
  res.a1 = std::abs(c);
  res.absorbed_phase = std::arg(c);
  if (res.a1 >= 1.0 - 1e-12) {
    res.degenerate = true;
    return res;
  }
  std::vector<Amplitude> rem(psi.amps());
  for (std::size_t i = 0; i < rem.size(); ++i) rem[i] -= c * target.amp(i);
  double nrm = 0.0;
  for (const auto& a : rem) nrm += std::norm(a);
  nrm = std::sqrt(nrm);
  for (auto& a : rem) a /= nrm;
  res.remainder = psi.with_amps(std::move(rem));
  return res;
}

ConstraintReport check_constraints(const ProbabilityLaw& law, int n, std::size_t samples,
                                   std::uint64_t rng_seed) {
  require(n >= 2, "check_constraints: n must be >= 2");
  Rng rng(rng_seed);
  ConstraintReport rep;
  rep.n = n;
  rep.samples = samples;
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < samples; ++s) {
    double nrm = 0.0;
    for (auto& v : x) {
      v = std::abs(rng.normal());
      nrm += v * v;
    }
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double p = law.eval(k, x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(k)] / nrm);
      sum += p;
      if (p < 0.0) rep.max_range_violation = std::max(rep.max_range_violation, -p);
      if (p > 1.0) rep.max_range_violation = std::max(rep.max_range_violation, p - 1.0);
    }
    rep.max_sum_violation = std::max(rep.max_sum_violation, std::abs(sum - 1.0));
  }
  return rep;
}

LagrangeReport lagrange_residual(const ProbabilityLaw& law, const std::vector<double>& a,
                                 double fd_step) {
  require(fd_step > 0.0, "lagrange_residual: fd_step must be positive");
  LagrangeReport rep;
  const int n = static_cast<int>(a.size());
  rep.values.assign(a.size(), std::numeric_limits<double>::quiet_NaN());
  rep.skipped.assign(a.size(), false);
  for (int k = 0; k < n; ++k) {
    const double ak = a[static_cast<std::size_t>(k)];
    if (ak < 10.0 * fd_step) {  // singularity at the pole
      rep.skipped[static_cast<std::size_t>(k)] = true;
      continue;
    }
    const double hi = law.eval(k, (ak + fd_step) * (ak + fd_step));
    const double lo = law.eval(k, (ak - fd_step) * (ak - fd_step));
    rep.values[static_cast<std::size_t>(k)] = (hi - lo) / (2.0 * fd_step) / ak;
  }
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k)
      if (!rep.skipped[static_cast<std::size_t>(j)] && !rep.skipped[static_cast<std::size_t>(k)])
        rep.max_pair_residual =
            std::max(rep.max_pair_residual,
                     std::abs(rep.values[static_cast<std::size_t>(j)] -
                              rep.values[static_cast<std::size_t>(k)]));
  return rep;
}

CompositionReport compose_auxiliary(const ProbabilityLaw& law, const std::vector<double>& a,
                                    const std::vector<std::vector<double>>& b) {
  require(a.size() == b.size(), "compose_auxiliary: need one auxiliary list per outcome");
  double sa = 0.0;
  for (double v : a) sa += v * v;
  require(std::abs(sa - 1.0) <= 1e-10, "compose_auxiliary: base amplitudes not normalized");
  for (const auto& bk : b) {
    double sb = 0.0;
    for (double v : bk) sb += v * v;
    require(std::abs(sb - 1.0) <= 1e-10, "compose_auxiliary: auxiliary amplitudes not normalized");
  }
  CompositionReport rep;
  rep.violation.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double xa = a[k] * a[k];
    const double pk = law.eval(static_cast<int>(k), xa);
    for (std::size_t j = 0; j < b[k].size(); ++j) {
      const double xb = b[k][j] * b[k][j];
      // composed system treated as one experiment on its a(k)b(k,j) amplitudes
      const double p12 = law.eval(static_cast<int>(k), (a[k] * b[k][j]) * (a[k] * b[k][j]));
      const double p2 = law.eval(static_cast<int>(j), xb);
      const double v = std::abs(p12 - pk * p2);
      rep.violation[k].push_back(v);
      rep.max_violation = std::max(rep.max_violation, v);
    }
  }
  return rep;
}

BornSolution derive_born(const std::vector<BornProbe>& probes, int n) {
  require(n >= 2, "derive_born: n must be >= 2");
  require(!probes.empty(), "derive_born: empty probe set");
  // Unknowns: lambda, c(0..n-1). Each probe yields, after differencing the
  // composition identity across its b-values and cancelling the common lambda
  // ratio, the linear condition (lambda/2) a_sq + c(k) = slope where slope is
  // the measured d p12 / d b_sq.
  const std::size_t dim = static_cast<std::size_t>(n) + 1;
  std::vector<std::vector<double>> ata(dim, std::vector<double>(dim, 0.0));
  std::vector<double> atb(dim, 0.0);
  for (const auto& p : probes) {
    require(p.k >= 0 && p.k < n, "derive_born: probe outcome index out of range");
    std::set<double> distinct(p.b_sq.begin(), p.b_sq.end());
    require(distinct.size() >= 2, "degenerate probe set");
    std::vector<double> p12 = p.p12;
    if (p12.empty())
      for (double xb : p.b_sq) p12.push_back(p.a_sq * xb);
    require(p12.size() == p.b_sq.size(), "derive_born: p12/b_sq length mismatch");
    // least-squares slope of p12 against b_sq
    double mb = 0.0, mp = 0.0;
    for (std::size_t i = 0; i < p.b_sq.size(); ++i) {
      mb += p.b_sq[i];
      mp += p12[i];
    }
    mb /= static_cast<double>(p.b_sq.size());
    mp /= static_cast<double>(p12.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < p.b_sq.size(); ++i) {
      num += (p.b_sq[i] - mb) * (p12[i] - mp);
      den += (p.b_sq[i] - mb) * (p.b_sq[i] - mb);
    }
    const double slope = num / den;
    // row: [a_sq/2, e_k] . [lambda, c] = slope
    std::vector<double> row(dim, 0.0);
    row[0] = 0.5 * p.a_sq;
    row[1 + static_cast<std::size_t>(p.k)] = 1.0;
    for (std::size_t i = 0; i < dim; ++i) {
      atb[i] += row[i] * slope;
      for (std::size_t j = 0; j < dim; ++j) ata[i][j] += row[i] * row[j];
    }
  }
  std::vector<double> sol = solve_linear(std::move(ata), std::move(atb));
  BornSolution out;
  out.lambda = sol[0];
  out.c.assign(sol.begin() + 1, sol.end());
  return out;
}

}  // namespace branchlab
