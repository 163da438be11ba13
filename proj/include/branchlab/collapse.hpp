#pragma once

#include <cstdint>
#include <vector>

#include "branchlab/tensorcore.hpp"

namespace branchlab {

/// Time series of per-branch coefficients and normalized weights for one run.
struct CollapseTrajectory {
  std::vector<double> times;
  std::vector<std::vector<Amplitude>> beta;  // [time][branch]
  std::vector<std::vector<double>> weights;  // [time][branch], each row sums to 1
  int outcome = -1;                          // 1-based absorbed branch, or -1
  bool resolved = false;
  std::size_t clipped_steps = 0;
};

/// Sequence of linear (not necessarily unitary) evolutions acting within the
/// branch subspaces of an n-branch state: one complex multiplier per branch
/// per time.
class LinearEvolutionFamily {
 public:
  LinearEvolutionFamily(std::vector<double> times,
                        std::vector<std::vector<Amplitude>> branch_multipliers);

  /// Random non-unitary diagonal family over `steps` times.
  static LinearEvolutionFamily random(int n, std::size_t steps, Rng& rng);
  /// Unitary family: all multipliers on the unit circle.
  static LinearEvolutionFamily random_unitary_family(int n, std::size_t steps, Rng& rng);

  const std::vector<double>& times() const { return times_; }
  int branch_count() const { return n_; }
  const Amplitude& beta(std::size_t t, int k) const {
    return mult_[t][static_cast<std::size_t>(k)];
  }

 private:
  std::vector<double> times_;
  std::vector<std::vector<Amplitude>> mult_;
  int n_;
};

/// Normalized weights X(k,t) = |beta(k,t)|^2 / sum_j |beta(j,t)|^2 extracted
/// from a linear family. The output
/// is independent of `a` apart from the stored betas; passing different
/// coefficient lists yields bitwise identical X series.
CollapseTrajectory linear_X(const LinearEvolutionFamily& fam, const std::vector<double>& a);

/// Exhibits the contradiction: X is coefficient-independent, so the run
/// average cannot track two different |a(k)|^2 profiles at once.
struct BornViolationCertificate {
  std::vector<std::vector<double>> average_X;  // [amplitude set][branch]
  double max_average_spread = 0.0;   // max over branches of spread across sets
  double min_target_gap = 0.0;       // min over sets of max_k |avg - |a(k)|^2|
  bool contradiction = false;        // averages equal but targets differ
  bool vacuous = false;              // fewer than two distinct sets
};

BornViolationCertificate born_violation_certificate(const LinearEvolutionFamily& fam,
                                                    const std::vector<std::vector<double>>& a_set);

struct CollapseParams {
  double sigma = 1.0;
  double dt = 1e-3;
  std::size_t max_steps = 1000000;
  double absorb_threshold = 1.0 - 1e-6;
  std::size_t record_stride = 0;  // 0: record nothing but endpoints
};

/// Simplex-preserving martingale diffusion
///   dx_k = sigma * x_k * (dW_k - sum_j x_j dW_j),
/// absorbed when some x_k exceeds the threshold. A nonlinear stochastic
/// surrogate with Born absorption frequencies; not a model of any published
/// collapse dynamics.
CollapseTrajectory stochastic_collapse_run(const std::vector<double>& a,
                                           const CollapseParams& params, std::uint64_t seed);

struct CollapseStatistics {
  std::vector<double> target;       // |a(k)|^2
  std::vector<double> frequency;    // empirical absorption frequencies
  std::vector<double> ci_halfwidth; // 3-sigma binomial half widths
  std::uint64_t runs = 0;
  std::uint64_t unresolved = 0;
  double clip_fraction = 0.0;
  bool pass = false;                // all |freq - target| within 3 sigma
};

CollapseStatistics collapse_statistics(const std::vector<double>& a, std::uint64_t runs,
                                       const CollapseParams& params, std::uint64_t seed);

}  // namespace branchlab
