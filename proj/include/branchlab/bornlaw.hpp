#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "branchlab/tensorcore.hpp"

namespace branchlab {

/// A candidate map from squared amplitude (and outcome index) to probability.
/// Implemented laws depend only on x = |a(k)|^2 and on k; anything else the
/// probability might depend on is carried as metadata and never varied.
class ProbabilityLaw {
 public:
  enum class Kind { Born, AffineQuadratic, OddCounterexample, GeneralAffine, Custom };

  static ProbabilityLaw born();
  /// P(x) = alpha*x + beta*x^2.
  static ProbabilityLaw affine_quadratic(double alpha, double beta);
  /// P(x) = x + eps*sin(2*pi*x); valid two-state law for 0 < eps <= 0.1
  /// (eps = 0 degenerates to Born).
  static ProbabilityLaw odd_counterexample(double eps);
  /// P_k(x) = (lambda/2)*x + c(k); c broadcast if a single value is given.
  static ProbabilityLaw general_affine(double lambda, std::vector<double> c);
  static ProbabilityLaw custom(std::string name, std::function<double(int, double)> fn);

  /// Probability of outcome k (0-based) at squared amplitude x.
  double eval(int k, double x) const;
  /// log(eval) given log(x); exact in log-space for the built-in laws so it
  /// stays finite far below double underflow.
  double log_eval(int k, double log_x) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double epsilon() const { return epsilon_; }

 private:
  ProbabilityLaw() = default;
  Kind kind_ = Kind::Born;
  std::string name_ = "born";
  double alpha_ = 1.0, beta_ = 0.0;   // affine_quadratic
  double epsilon_ = 0.0;              // odd_counterexample
  double lambda_ = 2.0;               // general_affine
  std::vector<double> c_;             // general_affine offsets
  std::function<double(int, double)> fn_;
};

/// Max violation of the sum-to-one constraint over sampled sphere points.
struct ConstraintReport {
  double max_sum_violation = 0.0;  // max |sum_k P_k - 1|
  double max_range_violation = 0.0;  // max excess outside [0,1]
  std::size_t samples = 0;
  int n = 0;
};

/// Single-detector reduction: project psi onto a target direction, absorb
/// phases so both coefficients come out real and nonnegative.
struct ReductionResult {
  double a1 = 0.0;                     // |<target|psi>|
  double absorbed_phase = 0.0;         // arg <target|psi>
  bool degenerate = false;             // a1 == 1, remainder undefined
  std::optional<StateVector> remainder;
};

ReductionResult single_detector_reduction(const StateVector& psi, const StateVector& target);

ConstraintReport check_constraints(const ProbabilityLaw& law, int n, std::size_t samples,
                                   std::uint64_t rng_seed);

/// (1/a_k) dP_k/da_k by central finite differences; 2 for Born everywhere.
struct LagrangeReport {
  std::vector<double> values;        // per component; NaN when skipped
  std::vector<bool> skipped;         // a(k) too close to the pole
  double max_pair_residual = 0.0;    // max |values[j] - values[k]| over kept pairs
};

LagrangeReport lagrange_residual(const ProbabilityLaw& law, const std::vector<double>& a,
                                 double fd_step = 1e-5);

/// Per-(k,j) violations of the composition rule
/// P_{1+2,k,j} = P_k * P_{2,j given k} for the composed two-stage experiment.
struct CompositionReport {
  std::vector<std::vector<double>> violation;  // [k][j]
  double max_violation = 0.0;
};

CompositionReport compose_auxiliary(const ProbabilityLaw& law, const std::vector<double>& a,
                                    const std::vector<std::vector<double>>& b);

/// Probe data for the affine-family solve: a base-system squared amplitude
/// for outcome k, composed with at least two distinct auxiliary squared
/// amplitudes.
struct BornProbe {
  int k = 0;
  double a_sq = 0.0;
  std::vector<double> b_sq;
  /// Measured composed probabilities per b-probe; defaults to the
  /// composition-consistent values a_sq * b_sq when empty.
  std::vector<double> p12;
};

struct BornSolution {
  double lambda = 0.0;
  std::vector<double> c;
};

/// Solve the linear conditions obtained by differencing the composition
/// identity across the b-probes; unique solution (lambda = 2, c = 0).
BornSolution derive_born(const std::vector<BornProbe>& probes, int n);

}  // namespace branchlab
